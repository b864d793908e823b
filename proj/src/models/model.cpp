#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include <fmt/format.h>

#include "../text.hpp"
#include "gnsspred/error.hpp"
#include "gnsspred/metrics.hpp"
#include "gnsspred/models.hpp"

namespace gnsspred {

std::string_view to_string(MethodKind kind) noexcept {
  switch (kind) {
    case MethodKind::MLP: return "MLP";
    case MethodKind::BNN: return "BNN";
    case MethodKind::GP: return "GP";
    case MethodKind::KNN: return "KNN";
    case MethodKind::GRNN: return "GRNN";
    case MethodKind::CART: return "CART";
    case MethodKind::SVR: return "SVR";
  }
  return "?";
}

MethodKind parse_method(std::string_view name) {
  std::string upper(detail::trim(name));
  std::transform(upper.begin(), upper.end(), upper.begin(),
                 [](unsigned char c) { return static_cast<char>(std::toupper(c)); });
  for (auto kind : kAllMethods) {
    if (upper == to_string(kind)) return kind;
  }
  throw Error(ErrorCode::ConfigError, fmt::format("unknown method '{}'", name));
}

std::vector<MethodKind> parse_method_list(std::string_view list) {
  std::vector<MethodKind> out;
  for (auto item : detail::split_on(list, ',')) {
    if (item.empty()) continue;
    const auto kind = parse_method(item);
    if (std::find(out.begin(), out.end(), kind) == out.end()) out.push_back(kind);
  }
  if (out.empty()) throw Error(ErrorCode::ConfigError, "empty method list");
  return out;
}

std::size_t listing_index(MethodKind kind) noexcept {
  return static_cast<std::size_t>(kind);
}

namespace {

[[noreturn]] void bad(MethodKind kind, const std::string& why) {
  throw Error(ErrorCode::BadHyperparameters, fmt::format("{}: {}", to_string(kind), why));
}

void check_grid(MethodKind kind, const std::vector<double>& grid, std::string_view name,
                bool allow_zero) {
  if (grid.empty()) bad(kind, fmt::format("{} grid is empty", name));
  for (double v : grid) {
    if (!std::isfinite(v) || v < 0.0 || (!allow_zero && v == 0.0)) {
      bad(kind, fmt::format("{} grid value {} out of range", name, v));
    }
  }
}

void check_mlp(MethodKind kind, const MlpParams& p) {
  if (p.width < 1) bad(kind, "hidden width must be >= 1");
  if (p.epochs < 1) bad(kind, "epochs must be >= 1");
  if (!(p.learning_rate > 0.0) || !std::isfinite(p.learning_rate)) {
    bad(kind, "learning rate must be positive");
  }
}

}  // namespace

void Hyperparameters::validate(MethodKind kind) const {
  switch (kind) {
    case MethodKind::GP:
      check_grid(kind, gp.lengthscale_grid, "lengthscale", false);
      check_grid(kind, gp.noise_grid, "noise", true);
      if (!(gp.signal_variance > 0.0) || !std::isfinite(gp.signal_variance)) {
        bad(kind, "signal variance must be positive");
      }
      if (!(gp.validation_fraction > 0.0 && gp.validation_fraction < 1.0)) {
        bad(kind, "validation fraction must be in (0, 1)");
      }
      break;
    case MethodKind::KNN:
      if (knn.k < 1) bad(kind, "k must be >= 1");
      break;
    case MethodKind::GRNN:
      check_grid(kind, grnn.bandwidth_grid, "bandwidth", false);
      break;
    case MethodKind::CART:
      if (cart.max_depth < 1) bad(kind, "max depth must be >= 1");
      if (cart.min_samples_leaf < 1) bad(kind, "min samples per leaf must be >= 1");
      break;
    case MethodKind::SVR:
      if (!(svr.c > 0.0) || !std::isfinite(svr.c)) bad(kind, "C must be positive");
      if (!(svr.epsilon >= 0.0) || !std::isfinite(svr.epsilon)) bad(kind, "epsilon must be >= 0");
      if (svr.kernel == SvrKernel::Rbf && (!(svr.gamma > 0.0) || !std::isfinite(svr.gamma))) {
        bad(kind, "gamma must be positive");
      }
      if (svr.max_passes < 1) bad(kind, "max passes must be >= 1");
      if (!(svr.tolerance > 0.0)) bad(kind, "tolerance must be positive");
      break;
    case MethodKind::MLP:
      check_mlp(kind, mlp);
      break;
    case MethodKind::BNN:
      check_mlp(kind, bnn.member);
      if (bnn.ensemble_size < 1) bad(kind, "ensemble size must be >= 1");
      if (!(bnn.prior_stddev > 0.0)) bad(kind, "prior stddev must be positive");
      break;
  }
}

ForecastModel::ForecastModel(MethodKind kind, FittedState state, Standardization standardization,
                             std::string selection)
    : kind_(kind),
      state_(std::move(state)),
      standardization_(standardization),
      selection_(std::move(selection)) {}

std::vector<double> ForecastModel::predict_standardized(std::span<const double> times) const {
  std::vector<double> out(times.size());
  std::visit(
      [&](const auto& s) {
        using T = std::decay_t<decltype(s)>;
        for (std::size_t i = 0; i < times.size(); ++i) {
          const double t = times[i];
          if constexpr (std::is_same_v<T, fitted::Mlp>) {
            out[i] = s.net(t);
          } else if constexpr (std::is_same_v<T, fitted::Bnn>) {
            double sum = 0.0;
            for (const auto& m : s.members) sum += m(t);
            out[i] = sum / static_cast<double>(s.members.size());
          } else if constexpr (std::is_same_v<T, fitted::Gp>) {
            out[i] = gp_predict(s, t);
          } else if constexpr (std::is_same_v<T, fitted::Knn>) {
            out[i] = knn_predict(s, t);
          } else if constexpr (std::is_same_v<T, fitted::Grnn>) {
            out[i] = grnn_predict(s, t);
          } else if constexpr (std::is_same_v<T, fitted::Cart>) {
            out[i] = cart_predict(s, t);
          } else {
            out[i] = svr_predict(s, t);
          }
        }
      },
      state_);
  return out;
}

std::vector<double> ForecastModel::predict(std::span<const double> times) const {
  auto out = predict_standardized(times);
  for (auto& v : out) v = standardization_.invert(v);
  return out;
}

std::vector<double> predict(const ForecastModel& model, std::span<const double> times) {
  return model.predict(times);
}

namespace {

void check_training_data(std::span<const double> times, std::span<const double> values) {
  if (times.size() != values.size()) {
    throw Error(ErrorCode::DimensionMismatch,
                fmt::format("{} training times vs {} values", times.size(), values.size()));
  }
  if (times.size() < 2) {
    throw Error(ErrorCode::InsufficientData, "at least two training samples are required");
  }
  for (std::size_t i = 0; i < times.size(); ++i) {
    if (!std::isfinite(times[i]) || !std::isfinite(values[i])) {
      throw Error(ErrorCode::InsufficientData, fmt::format("non-finite training sample {}", i));
    }
    if (i > 0 && !(times[i] > times[i - 1])) {
      throw Error(ErrorCode::DegenerateRange,
                  fmt::format("training times not strictly increasing at {}", i));
    }
  }
  if (times.front() < 0.0 || times.back() > 1.0) {
    throw Error(ErrorCode::DegenerateRange, "training times must lie in [0, 1]");
  }
}

double rmse_std(std::span<const double> a, std::span<const double> b) {
  double ss = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) ss += (a[i] - b[i]) * (a[i] - b[i]);
  return std::sqrt(ss / static_cast<double>(a.size()));
}

template <class Predict>
std::vector<double> eval(std::span<const double> times, Predict&& f) {
  std::vector<double> out(times.size());
  for (std::size_t i = 0; i < times.size(); ++i) out[i] = f(times[i]);
  return out;
}

FittedState fit_gp(const GpParams& p, std::span<const double> t, std::span<const double> y,
                   std::string& selection) {
  const std::size_t n = t.size();
  // Trailing validation slice, at least one point, leaving at least two to fit.
  std::size_t n_val = static_cast<std::size_t>(std::ceil(p.validation_fraction * n));
  n_val = std::clamp<std::size_t>(n_val, 1, n - 2 > 0 ? n - 2 : 1);
  const std::size_t n_fit = n - n_val;

  double best_score = std::numeric_limits<double>::infinity();
  double best_ell = p.lengthscale_grid.front();
  double best_noise = p.noise_grid.front();
  bool any = false;
  if (n_fit >= 2) {
    for (double ell : p.lengthscale_grid) {
      for (double noise : p.noise_grid) {
        try {
          const auto gp = gp_fit_fixed(t.first(n_fit), y.first(n_fit), ell, p.signal_variance, noise);
          const auto pred = eval(t.subspan(n_fit), [&](double q) { return gp_predict(gp, q); });
          const double score = rmse_std(pred, y.subspan(n_fit));
          if (std::isfinite(score) && score < best_score) {
            best_score = score;
            best_ell = ell;
            best_noise = noise;
            any = true;
          }
        } catch (const Error& e) {
          if (e.code() != ErrorCode::NotPositiveDefinite) throw;
        }
      }
    }
  }
  if (!any && n_fit >= 2) {
    throw Error(ErrorCode::NumericalFailure, "GP: no grid point produced a usable fit");
  }
  selection = fmt::format("lengthscale={} noise={} signal={}", best_ell, best_noise,
                          p.signal_variance);
  try {
    return gp_fit_fixed(t, y, best_ell, p.signal_variance, best_noise);
  } catch (const Error& e) {
    if (e.code() == ErrorCode::NotPositiveDefinite) {
      throw Error(ErrorCode::NumericalFailure, fmt::format("GP: {}", e.what()));
    }
    throw;
  }
}

FittedState fit_grnn(const GrnnParams& p, std::span<const double> t, std::span<const double> y,
                     std::string& selection) {
  fitted::Grnn best;
  double best_score = std::numeric_limits<double>::infinity();
  for (double sigma : p.bandwidth_grid) {
    fitted::Grnn g{{t.begin(), t.end()}, {y.begin(), y.end()}, sigma};
    const double score = rmse_std(eval(t, [&](double q) { return grnn_predict(g, q); }), y);
    if (score < best_score || best.times.empty()) {
      best_score = score;
      best = std::move(g);
    }
  }
  selection = fmt::format("bandwidth={}", best.bandwidth);
  return best;
}

RngStream network_stream(const RngStream& rng, std::uint64_t seed) {
  return rng.fork("network").fork(seed);
}

}  // namespace

ForecastModel fit(MethodKind kind, const Hyperparameters& hp, std::span<const double> train_times,
                  std::span<const double> train_values, const RngStream& rng) {
  hp.validate(kind);
  check_training_data(train_times, train_values);
  const auto standardized = standardize_values(train_values);
  const std::span<const double> t = train_times;
  const std::span<const double> y = standardized.values;

  std::string selection;
  FittedState state;
  switch (kind) {
    case MethodKind::GP:
      state = fit_gp(hp.gp, t, y, selection);
      break;
    case MethodKind::KNN: {
      const std::size_t k = std::min(hp.knn.k, t.size());
      state = fitted::Knn{{t.begin(), t.end()}, {y.begin(), y.end()}, k, hp.knn.weighting};
      selection = fmt::format("k={} weighting={}", k,
                              hp.knn.weighting == KnnWeighting::Uniform ? "uniform" : "inverse-distance");
      break;
    }
    case MethodKind::GRNN:
      state = fit_grnn(hp.grnn, t, y, selection);
      break;
    case MethodKind::CART: {
      auto cart = cart_fit(t, y, hp.cart);
      selection = fmt::format("depth={} leaves={}", cart.depth, cart.leaves);
      state = std::move(cart);
      break;
    }
    case MethodKind::SVR: {
      auto svr = svr_fit(t, y, hp.svr);
      selection = fmt::format("C={} epsilon={} support_vectors={} iterations={}", hp.svr.c,
                              hp.svr.epsilon, svr.support_vectors, svr.iterations);
      state = std::move(svr);
      break;
    }
    case MethodKind::MLP:
      state = fitted::Mlp{mlp_train(hp.mlp, t, y, network_stream(rng, hp.mlp.seed))};
      selection = fmt::format("width={} epochs={} rate={}", hp.mlp.width, hp.mlp.epochs,
                              hp.mlp.learning_rate);
      break;
    case MethodKind::BNN: {
      fitted::Bnn bnn;
      for (std::size_t k = 0; k < hp.bnn.ensemble_size; ++k) {
        bnn.members.push_back(
            bnn_train_member(hp.bnn, k, t, y, network_stream(rng, hp.bnn.member.seed)));
      }
      selection = fmt::format("ensemble={} prior_stddev={}", hp.bnn.ensemble_size,
                              hp.bnn.prior_stddev);
      state = std::move(bnn);
      break;
    }
  }

  ForecastModel model(kind, std::move(state), standardized.transform, std::move(selection));
  const auto in_sample = model.predict(train_times);
  for (double v : in_sample) {
    if (!std::isfinite(v)) {
      throw Error(ErrorCode::NumericalFailure,
                  fmt::format("{}: non-finite in-sample prediction", to_string(kind)));
    }
  }
  model.training_rmse_ = rmse(in_sample, train_values);
  return model;
}

}  // namespace gnsspred
