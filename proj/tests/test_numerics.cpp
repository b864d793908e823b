#include <doctest.h>

#include <cmath>
#include <random>

#include "gnsspred/error.hpp"
#include "gnsspred/numerics.hpp"
#include "oracles.hpp"

using namespace gnsspred;

namespace {

SymMatrix random_spd(std::size_t n, std::mt19937_64& gen) {
  std::normal_distribution<double> nd;
  std::vector<std::vector<double>> b(n, std::vector<double>(n));
  for (auto& row : b)
    for (auto& v : row) v = nd(gen);
  SymMatrix a(n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j <= i; ++j) {
      double s = 0;
      for (std::size_t k = 0; k < n; ++k) s += b[i][k] * b[j][k];
      a(i, j) = s + (i == j ? double(n) : 0.0);
    }
  }
  return a;
}

}  // namespace

TEST_CASE("cholesky of the identity is the identity") {
  SymMatrix a(3);
  for (std::size_t i = 0; i < 3; ++i) a(i, i) = 1.0;
  const auto l = cholesky(a, 0.0);
  for (std::size_t i = 0; i < 3; ++i)
    for (std::size_t j = 0; j < 3; ++j) CHECK(l(i, j) == (i == j ? 1.0 : 0.0));
  CHECK(l.jitter() == 0.0);
}

TEST_CASE("cholesky of a 2x2 matches the hand factorization") {
  SymMatrix a(2);
  a(0, 0) = 4;
  a(1, 0) = 2;
  a(1, 1) = 3;
  const auto l = cholesky(a);
  CHECK(l(0, 0) == doctest::Approx(2.0).epsilon(1e-15));
  CHECK(l(1, 0) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(l(1, 1) == doctest::Approx(std::sqrt(2.0)).epsilon(1e-15));
  CHECK(l(0, 1) == 0.0);
}

TEST_CASE("rank-deficient matrix needs jitter or fails") {
  SymMatrix a(2);
  a(0, 0) = a(1, 0) = a(1, 1) = 1.0;
  try {
    const auto l = cholesky(a, 0.0);
    CHECK(l.jitter() > 0.0);
    CHECK(l.jitter() <= 1e-7 * a.mean_diagonal() * (1 + 1e-12));
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::NotPositiveDefinite);
  }
}

TEST_CASE("indefinite matrix is rejected") {
  SymMatrix a(2);
  a(0, 0) = 1;
  a(1, 0) = 3;
  a(1, 1) = 1;
  CHECK_THROWS_AS(cholesky(a), Error);
  try {
    cholesky(a);
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::NotPositiveDefinite);
  }
}

TEST_CASE("cholesky reconstructs random SPD matrices up to order 200") {
  std::mt19937_64 gen(7);
  for (std::size_t n : {1u, 2u, 5u, 17u, 64u, 200u}) {
    const auto a = random_spd(n, gen);
    const double jitter = 1e-3;
    const auto l = cholesky(a, jitter);
    double worst = 0;
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j <= i; ++j) {
        double s = 0;
        for (std::size_t k = 0; k <= j; ++k) s += l(i, k) * l(j, k);
        worst = std::max(worst, std::fabs(s - a(i, j) - (i == j ? jitter : 0.0)));
      }
    }
    CAPTURE(n);
    CHECK(worst < 1e-10 * a.max_abs());
  }
}

TEST_CASE("solve_spd on small systems") {
  SymMatrix eye(3);
  for (std::size_t i = 0; i < 3; ++i) eye(i, i) = 1;
  const std::vector<double> b{1.5, -2.0, 7.25};
  CHECK(solve_spd(cholesky(eye), b) == b);

  SymMatrix a(2);
  a(0, 0) = 4;
  a(1, 0) = 2;
  a(1, 1) = 3;
  const auto x = solve_spd(cholesky(a), std::vector<double>{8, 8});
  CHECK(x[0] == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(x[1] == doctest::Approx(2.0).epsilon(1e-14));
  // multiply back
  CHECK(4 * x[0] + 2 * x[1] == doctest::Approx(8.0));
  CHECK(2 * x[0] + 3 * x[1] == doctest::Approx(8.0));

  try {
    solve_spd(cholesky(a), std::vector<double>{1, 2, 3});
    FAIL("expected DimensionMismatch");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::DimensionMismatch);
  }
}

TEST_CASE("solve_spd agrees with Gaussian elimination") {
  std::mt19937_64 gen(11);
  std::normal_distribution<double> nd;
  for (std::size_t n = 1; n <= 50; n += 7) {
    const auto a = random_spd(n, gen);
    oracle::Dense dense(n, std::vector<double>(n));
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) dense[i][j] = a(i, j);
    std::vector<double> b(n);
    for (auto& v : b) v = nd(gen);
    const auto x = solve_spd(cholesky(a), b);
    const auto ref = oracle::gauss_solve(dense, b);
    double scale = 0, worst = 0, bmax = 0, resid = 0;
    for (std::size_t i = 0; i < n; ++i) {
      scale = std::max(scale, std::fabs(ref[i]));
      worst = std::max(worst, std::fabs(x[i] - ref[i]));
      bmax = std::max(bmax, std::fabs(b[i]));
      double s = 0;
      for (std::size_t j = 0; j < n; ++j) s += dense[i][j] * x[j];
      resid = std::max(resid, std::fabs(s - b[i]));
    }
    CAPTURE(n);
    CHECK(worst <= 1e-8 * scale);
    CHECK(resid < 1e-8 * bmax);
  }
}

TEST_CASE("rng_normal contract") {
  const RngStream s(42, 0);
  CHECK(rng_normal(s, 0).empty());
  CHECK(rng_normal(s, 100) == rng_normal(s, 100));

  const auto draws = rng_normal(s, 100000);
  double mean = 0;
  for (double d : draws) mean += d;
  mean /= draws.size();
  double var = 0;
  for (double d : draws) var += (d - mean) * (d - mean);
  var /= draws.size() - 1;
  CHECK(std::fabs(mean) < 0.02);
  CHECK(var >= 0.97);
  CHECK(var <= 1.03);
}

TEST_CASE("rng uniform lies in the open unit interval") {
  RngStream s(1, 2);
  for (int i = 0; i < 10000; ++i) {
    const double u = s.uniform();
    REQUIRE(u > 0.0);
    REQUIRE(u < 1.0);
  }
}

TEST_CASE("forks are deterministic and distinct") {
  const RngStream base(42, 0);
  auto a = base.fork("network");
  auto b = base.fork("network");
  auto c = base.fork("noise");
  auto d = base.fork(std::uint64_t{1});
  const auto x = a.next_u64();
  CHECK(x == b.next_u64());
  CHECK(x != c.next_u64());
  CHECK(x != d.next_u64());
  // forking does not advance the parent
  auto p1 = base;
  auto p2 = base;
  (void)p1.fork(3);
  CHECK(p1.next_u64() == p2.next_u64());
}

TEST_CASE("golden vector: seed 42, stream 0") {
  // Frozen from the reference run; any change here breaks reproducibility of
  // every stored report.
  RngStream s(42, 0);
  const std::uint64_t golden_u64[4] = {4492119297146005083ull, 4259705312782616147ull, 13982144558661182781ull, 5300910727443912716ull};
  for (auto g : golden_u64) CHECK(s.next_u64() == g);
  const double golden_normal[8] = {-0.75129349192879191, 0.97915762913281712, -1.0429427167755625, 0.073975887593404427, -0.74270670172077646, 1.6184639223773754, -0.24011113488339106, -0.85073388739050493};
  const auto draws = rng_normal(RngStream(42, 0), 8);
  for (std::size_t i = 0; i < 8; ++i) CHECK(draws[i] == golden_normal[i]);
}

TEST_CASE("hash_string is FNV-1a") {
  CHECK(hash_string("") == 0xcbf29ce484222325ULL);
  CHECK(hash_string("a") == 0xaf63dc4c8601ec8cULL);
}
