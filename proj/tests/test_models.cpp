#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "gnsspred/error.hpp"
#include "gnsspred/models.hpp"
#include "oracles.hpp"

using namespace gnsspred;
using V = std::vector<double>;

namespace {

V linspace(std::size_t n) {
  V t(n);
  for (std::size_t i = 0; i < n; ++i) t[i] = double(i) / double(n - 1);
  return t;
}

// A trending, wiggly series in meters around an ECEF-sized intercept.
V wiggly(const V& t, double base = 4.1e6) {
  V v;
  for (double x : t) v.push_back(base + 0.02 * x + 0.004 * std::sin(9.0 * x) + 0.001 * std::cos(31.0 * x));
  return v;
}

const RngStream kRng(42, 7);

ErrorCode code_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  return ErrorCode::ParseError;  // sentinel: nothing thrown
}

double mean_of(const V& v) {
  long double s = 0;
  for (double x : v) s += x;
  return double(s / v.size());
}

Hyperparameters quick() {
  Hyperparameters hp;
  hp.mlp.epochs = 300;
  hp.bnn.member.epochs = 300;
  hp.bnn.ensemble_size = 2;
  return hp;
}

}  // namespace

TEST_CASE("method names") {
  for (auto k : kAllMethods) CHECK(parse_method(to_string(k)) == k);
  CHECK(parse_method("gp") == MethodKind::GP);
  CHECK(parse_method_list("GP, knn") == std::vector<MethodKind>{MethodKind::GP, MethodKind::KNN});
  CHECK(code_of([] { parse_method("RBF"); }) == ErrorCode::ConfigError);
  CHECK(listing_index(MethodKind::MLP) == 0);
  CHECK(listing_index(MethodKind::SVR) == 6);
}

TEST_CASE("hyperparameter validation") {
  const V t = linspace(10), v = wiggly(t);
  Hyperparameters hp;
  hp.knn.k = 0;
  CHECK(code_of([&] { fit(MethodKind::KNN, hp, t, v, kRng); }) == ErrorCode::BadHyperparameters);
  hp = {};
  hp.gp.lengthscale_grid = {0.1, -1.0};
  CHECK(code_of([&] { fit(MethodKind::GP, hp, t, v, kRng); }) == ErrorCode::BadHyperparameters);
  hp = {};
  hp.svr.c = 0;
  CHECK(code_of([&] { fit(MethodKind::SVR, hp, t, v, kRng); }) == ErrorCode::BadHyperparameters);
  hp = {};
  hp.mlp.width = 0;
  CHECK(code_of([&] { fit(MethodKind::MLP, hp, t, v, kRng); }) == ErrorCode::BadHyperparameters);
  hp = {};
  hp.cart.max_depth = 0;
  CHECK(code_of([&] { fit(MethodKind::CART, hp, t, v, kRng); }) == ErrorCode::BadHyperparameters);
  hp = {};
  hp.grnn.bandwidth_grid = {};
  CHECK(code_of([&] { fit(MethodKind::GRNN, hp, t, v, kRng); }) == ErrorCode::BadHyperparameters);
  hp = {};
  hp.bnn.prior_stddev = 0;
  CHECK(code_of([&] { fit(MethodKind::BNN, hp, t, v, kRng); }) == ErrorCode::BadHyperparameters);
}

TEST_CASE("training data preconditions") {
  Hyperparameters hp;
  CHECK(code_of([&] { fit(MethodKind::KNN, hp, V{0.0}, V{1.0}, kRng); }) == ErrorCode::InsufficientData);
  CHECK(code_of([&] { fit(MethodKind::KNN, hp, V{0, 1}, V{1.0}, kRng); }) == ErrorCode::DimensionMismatch);
  CHECK(code_of([&] { fit(MethodKind::KNN, hp, V{0, 0.5, 0.5, 1}, V{1, 2, 3, 4}, kRng); }) ==
        ErrorCode::DegenerateRange);
  CHECK(code_of([&] { fit(MethodKind::KNN, hp, V{0, 2}, V{1, 2}, kRng); }) == ErrorCode::DegenerateRange);
}

TEST_CASE("KNN k=1 memorizes") {
  const V t = linspace(40), v = wiggly(t);
  Hyperparameters hp;
  hp.knn.k = 1;
  const auto m = fit(MethodKind::KNN, hp, t, v, kRng);
  CHECK(m.training_rmse() == 0.0);
  const auto p = m.predict(t);
  for (std::size_t i = 0; i < t.size(); ++i) CHECK(p[i] == v[i]);
}

TEST_CASE("KNN ties go to the earlier index") {
  fitted::Knn knn{{0.0, 0.5, 1.0}, {10.0, 20.0, 30.0}, 1, KnnWeighting::Uniform};
  CHECK(knn_predict(knn, 0.25) == 10.0);
  CHECK(knn_predict(knn, 0.75) == 20.0);
  knn.k = 2;
  CHECK(knn_predict(knn, 0.5) == 15.0);  // self plus the earlier neighbour
}

TEST_CASE("KNN k=n with uniform weights predicts the training mean anywhere") {
  const V t = linspace(37), v = wiggly(t);
  Hyperparameters hp;
  hp.knn.k = t.size();
  hp.knn.weighting = KnnWeighting::Uniform;
  const auto m = fit(MethodKind::KNN, hp, t, v, kRng);
  const double scale = m.standardization().scale;
  for (double q : {-0.3, 0.0, 0.41, 1.0, 1.5, 3.0}) {
    CHECK(std::fabs(m.predict(V{q})[0] - mean_of(v)) < 1e-6 * scale);
  }
}

TEST_CASE("CART with unlimited depth and min leaf 1 is exact on distinct times") {
  const V t = linspace(64), v = wiggly(t);
  Hyperparameters hp;
  hp.cart.max_depth = CartParams::kUnlimitedDepth;
  hp.cart.min_samples_leaf = 1;
  const auto m = fit(MethodKind::CART, hp, t, v, kRng);
  CHECK(m.training_rmse() == 0.0);
  const auto& cart = std::get<fitted::Cart>(m.state());
  CHECK(cart.leaves == t.size());
}

TEST_CASE("CART respects depth and leaf limits") {
  const V t = linspace(100), v = wiggly(t);
  CartParams p;
  p.max_depth = 3;
  p.min_samples_leaf = 5;
  const auto cart = cart_fit(t, standardize_values(v).values, p);
  CHECK(cart.depth <= 3);
  CHECK(cart.leaves <= 8);
  // locally constant beyond the data
  CHECK(cart_predict(cart, 1.2) == cart_predict(cart, 7.0));
}

TEST_CASE("gp_posterior_mean small cases") {
  CHECK(gp_posterior_mean(V{0.0, 1.0}, V{1.0, 2.0}, V{}, 0.5, 1.0, 0.0).empty());
  CHECK(gp_posterior_mean(V{0.0}, V{1.0}, V{0.0}, 0.3, 1.0, 0.0)[0] == doctest::Approx(1.0).epsilon(1e-15));

  // explicit 2x2 inverse
  const double l = 0.4, s2 = 1.3, nv = 0.01;
  const V t{0.1, 0.7}, y{0.5, -1.2};
  const double k11 = s2 + nv, k22 = s2 + nv, k12 = oracle::se(t[0], t[1], l, s2);
  const double det = k11 * k22 - k12 * k12;
  const double a0 = (k22 * y[0] - k12 * y[1]) / det, a1 = (-k12 * y[0] + k11 * y[1]) / det;
  for (double q : {0.0, 0.35, 0.9, 1.4}) {
    const double want = oracle::se(q, t[0], l, s2) * a0 + oracle::se(q, t[1], l, s2) * a1;
    CHECK(std::fabs(gp_posterior_mean(t, y, V{q}, l, s2, nv)[0] - want) < 1e-10);
  }
}

TEST_CASE("gp_posterior_mean matches the explicit inverse up to order 20") {
  std::mt19937_64 gen(21);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::normal_distribution<double> nd;
  for (std::size_t n = 1; n <= 20; ++n) {
    V t(n), y(n), q(7);
    for (auto& x : t) x = u(gen);
    std::sort(t.begin(), t.end());
    for (auto& x : y) x = nd(gen);
    for (auto& x : q) x = u(gen) * 1.5;
    const double l = 0.05 + u(gen) * 0.5, s2 = 0.5 + u(gen), nv = 1e-3 + u(gen) * 0.1;
    const auto got = gp_posterior_mean(t, y, q, l, s2, nv);
    const auto want = oracle::gp_mean(t, y, q, l, s2, nv);
    for (std::size_t i = 0; i < q.size(); ++i) REQUIRE(std::fabs(got[i] - want[i]) < 1e-8);
  }
}

TEST_CASE("GP interpolates noise-free sin(2 pi t) at 50 points") {
  const V t = linspace(50);
  V v;
  for (double x : t) v.push_back(std::sin(2.0 * std::numbers::pi * x));
  Hyperparameters hp;
  hp.gp.noise_grid = {1e-8, 1e-4, 1e-2};
  const auto m = fit(MethodKind::GP, hp, t, v, kRng);
  CHECK(m.training_rmse() < 1e-4);
  const auto p = m.predict(t);
  double worst = 0;
  for (std::size_t i = 0; i < t.size(); ++i) worst = std::max(worst, std::fabs(p[i] - v[i]));
  CHECK(worst < 1e-4);
}

TEST_CASE("GP recovers a linear series at training times") {
  const V t = linspace(30);
  V v;
  for (double x : t) v.push_back(4.0e6 + 0.05 * x);
  Hyperparameters hp;
  hp.gp.noise_grid = {1e-8};
  const auto m = fit(MethodKind::GP, hp, t, v, kRng);
  const auto p = m.predict(V{t[3], t[17]});
  CHECK(std::fabs(p[0] - v[3]) < 1e-4);
  CHECK(std::fabs(p[1] - v[17]) < 1e-4);
}

TEST_CASE("GRNN bandwidth limits") {
  const V t = linspace(41), v = wiggly(t);
  const auto sv = standardize_values(v);
  const double scale = sv.transform.scale;

  fitted::Grnn wide{t, sv.values, 1e3};
  for (double q : {0.5, 1.5, 2.0}) {
    CHECK(std::fabs(sv.transform.invert(grnn_predict(wide, q)) - mean_of(v)) < 1e-6 * scale);
  }

  fitted::Grnn narrow{t, sv.values, 1e-4};
  fitted::Knn nn{t, sv.values, 1, KnnWeighting::Uniform};
  for (double q : {0.013, 0.5, 0.777, 1.0, 1.5}) {
    CHECK(std::fabs(grnn_predict(narrow, q) - knn_predict(nn, q)) * scale < 1e-6 * scale);
  }
}

TEST_CASE("GRNN grid selection uses in-sample RMSE") {
  const V t = linspace(50), v = wiggly(t);
  Hyperparameters hp;
  hp.grnn.bandwidth_grid = {0.5, 0.01, 0.1};
  const auto m = fit(MethodKind::GRNN, hp, t, v, kRng);
  CHECK(std::get<fitted::Grnn>(m.state()).bandwidth == 0.01);
}

TEST_CASE("SVR with an oversized tube predicts its bias") {
  const V t = linspace(30), v = wiggly(t);
  const auto sv = standardize_values(v);
  SvrParams p;
  p.epsilon = 100.0;
  const auto svr = svr_fit(t, sv.values, p);
  CHECK(svr.support_vectors == 0);
  for (double q : {0.0, 0.3, 1.0, 1.7}) CHECK(std::fabs(svr_predict(svr, q) - svr.bias) < 1e-8);
}

TEST_CASE("SVR fits a smooth series") {
  const V t = linspace(80), v = wiggly(t);
  const auto m = fit(MethodKind::SVR, Hyperparameters{}, t, v, kRng);
  CHECK(m.training_rmse() < 0.2 * m.standardization().scale);
  const auto& svr = std::get<fitted::Svr>(m.state());
  for (double c : svr.coef) CHECK(std::fabs(c) <= Hyperparameters{}.svr.c * (1 + 1e-12));
}

TEST_CASE("SVR linear kernel follows a line") {
  const V t = linspace(25);
  V y;
  for (double x : t) y.push_back(2.0 * x - 1.0);
  SvrParams p;
  p.kernel = SvrKernel::Linear;
  p.epsilon = 0.01;
  p.c = 100;
  const auto svr = svr_fit(t, y, p);
  for (double q : {0.0, 0.5, 1.0}) CHECK(std::fabs(svr_predict(svr, q) - (2.0 * q - 1.0)) < 0.02);
}

TEST_CASE("gradient check on a width-8 network with 32 samples") {
  const V t = linspace(32);
  V y;
  for (double x : t) y.push_back(std::sin(5 * x) + 0.3 * x);
  MlpParams hp;
  hp.width = 8;
  for (std::uint64_t seed : {0ULL, 1ULL, 2ULL, 99ULL}) {
    CHECK(mlp_fit_gradient_check(hp, t, y, RngStream(seed, 3)) < 1e-4);
  }
}

TEST_CASE("zero-weight network at constant targets is stationary") {
  fitted::Network net;
  net.w.assign(4, 0.0);
  net.b.assign(4, 0.0);
  net.v.assign(4, 0.0);
  net.c = 0.7;
  const V t = linspace(10), y(10, 0.7);
  const auto lg = mlp_loss_gradient(net, t, y);
  CHECK(lg.loss == 0.0);
  for (double g : lg.gradient) CHECK(std::fabs(g) < 1e-10);
}

TEST_CASE("single identity unit matches the least-squares gradient") {
  fitted::Network net;
  net.activation = Activation::Identity;
  net.w = {0.8};
  net.b = {-0.3};
  net.v = {1.5};
  net.c = 0.2;
  const V t{0.0, 0.25, 0.6, 1.0}, y{1.0, -0.5, 0.3, 2.0};
  // f = c + v (w t + b); closed-form partials of mean (f - y)^2
  double gw = 0, gb = 0, gv = 0, gc = 0;
  for (std::size_t i = 0; i < t.size(); ++i) {
    const double h = net.w[0] * t[i] + net.b[0];
    const double r = net.c + net.v[0] * h - y[i];
    gw += 2 * r * net.v[0] * t[i] / t.size();
    gb += 2 * r * net.v[0] / t.size();
    gv += 2 * r * h / t.size();
    gc += 2 * r / t.size();
  }
  const auto lg = mlp_loss_gradient(net, t, y);
  CHECK(std::fabs(lg.gradient[0] - gw) < 1e-8);
  CHECK(std::fabs(lg.gradient[1] - gb) < 1e-8);
  CHECK(std::fabs(lg.gradient[2] - gv) < 1e-8);
  CHECK(std::fabs(lg.gradient[3] - gc) < 1e-8);
}

TEST_CASE("MLP training reduces the loss") {
  const V t = linspace(60);
  V y;
  for (double x : t) y.push_back(std::sin(4 * x));
  MlpParams hp;
  hp.epochs = 500;
  const auto net = mlp_train(hp, t, y, kRng);
  double before = 0;
  for (double v : y) before += v * v;
  before /= y.size();
  CHECK(mlp_loss_gradient(net, t, y).loss < 0.25 * before);
}

TEST_CASE("BNN with one member and an infinite prior is the MLP") {
  const V t = linspace(50), v = wiggly(t);
  Hyperparameters hp;
  hp.mlp.epochs = 400;
  hp.bnn.member = hp.mlp;
  hp.bnn.ensemble_size = 1;
  hp.bnn.prior_stddev = std::numeric_limits<double>::infinity();
  const auto mlp = fit(MethodKind::MLP, hp, t, v, kRng);
  const auto bnn = fit(MethodKind::BNN, hp, t, v, kRng);
  const V q{0.0, 0.5, 1.0, 1.05, 1.3};
  const auto a = mlp.predict_standardized(q), b = bnn.predict_standardized(q);
  for (std::size_t i = 0; i < q.size(); ++i) CHECK(std::fabs(a[i] - b[i]) < 1e-10);
}

TEST_CASE("BNN members differ and the prediction is their mean") {
  const V t = linspace(40), v = wiggly(t);
  auto hp = quick();
  hp.bnn.ensemble_size = 3;
  const auto m = fit(MethodKind::BNN, hp, t, v, kRng);
  const auto& bnn = std::get<fitted::Bnn>(m.state());
  REQUIRE(bnn.members.size() == 3);
  CHECK(bnn.members[0].w != bnn.members[1].w);
  const double q = 1.2;
  const double mean = (bnn.members[0](q) + bnn.members[1](q) + bnn.members[2](q)) / 3.0;
  CHECK(m.predict_standardized(V{q})[0] == doctest::Approx(mean).epsilon(1e-14));
}

TEST_CASE("constant-series law for all seven methods") {
  const V t = linspace(60);
  const double level = 4123456.789;
  const V v(t.size(), level);
  const auto hp = quick();
  const V q{1.0, 1.01, 1.1, 1.5, 2.0};
  for (auto kind : kAllMethods) {
    CAPTURE(to_string(kind));
    const auto m = fit(kind, hp, t, v, kRng);
    for (double p : m.predict(q)) CHECK(std::fabs(p - level) <= 1e-6 * level);
    CHECK(m.training_rmse() <= 1e-6 * level);
  }
}

TEST_CASE("shift equivariance for all seven methods") {
  const V t = linspace(50), v = wiggly(t, 0.0);
  const double c = 1234.5;
  V shifted = v;
  for (auto& x : shifted) x += c;
  const auto hp = quick();
  const V q{0.2, 1.0, 1.2};
  for (auto kind : kAllMethods) {
    CAPTURE(to_string(kind));
    const auto a = fit(kind, hp, t, v, kRng).predict(q);
    const auto b = fit(kind, hp, t, shifted, kRng).predict(q);
    for (std::size_t i = 0; i < q.size(); ++i) CHECK(std::fabs(b[i] - a[i] - c) <= 1e-6 * c);
  }
}

TEST_CASE("fit and predict are deterministic") {
  const V t = linspace(45), v = wiggly(t);
  const auto hp = quick();
  const V q{0.0, 0.33, 1.0, 1.1};
  for (auto kind : kAllMethods) {
    CAPTURE(to_string(kind));
    const auto a = fit(kind, hp, t, v, kRng);
    const auto b = fit(kind, hp, t, v, kRng);
    CHECK(a.predict(q) == b.predict(q));
    CHECK(a.training_rmse() == b.training_rmse());
    CHECK(a.predict(q) == predict(a, q));
    CHECK(std::isfinite(a.training_rmse()));
    CHECK(a.training_rmse() >= 0.0);
  }
}

TEST_CASE("different streams give different networks") {
  const V t = linspace(30), v = wiggly(t);
  const auto hp = quick();
  const auto a = fit(MethodKind::MLP, hp, t, v, RngStream(1, 1)).predict(V{1.1});
  const auto b = fit(MethodKind::MLP, hp, t, v, RngStream(2, 1)).predict(V{1.1});
  CHECK(a[0] != b[0]);
}
