// epsilon-insensitive support vector regression.
//
// Dual in the single-coefficient form (beta_i = alpha_i - alpha_i*):
//   minimize  1/2 beta^T K beta - y^T beta + eps * sum |beta_i|
//   s.t.      sum beta_i = 0,  -C <= beta_i <= C
// solved by SMO: each step moves one unit of beta from the maximally
// violating j to i, with the exact minimizer of the piecewise quadratic
// along that direction.

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>

#include <fmt/format.h>

#include "gnsspred/error.hpp"
#include "gnsspred/models.hpp"

namespace gnsspred {

namespace {

double kernel(SvrKernel kind, double gamma, double a, double b) noexcept {
  if (kind == SvrKernel::Linear) return a * b;
  const double d = a - b;
  return std::exp(-gamma * d * d);
}

struct PairProblem {
  double beta_i, beta_j;
  double gi, gj;  // smooth-part gradients
  double eta;     // K_ii + K_jj - 2 K_ij
  double eps;

  double objective(double delta) const noexcept {
    return delta * (gi - gj) + 0.5 * eta * delta * delta +
           eps * (std::abs(beta_i + delta) + std::abs(beta_j - delta));
  }
};

// Exact minimizer over [lo, hi] of a convex piecewise quadratic with kinks at
// -beta_i and beta_j: compare the box ends, the kinks and each sign pattern's
// stationary point.
double minimize_pair(const PairProblem& p, double lo, double hi) noexcept {
  std::array<double, 8> candidates{};
  std::size_t count = 0;
  candidates[count++] = lo;
  candidates[count++] = hi;
  for (double kink : {-p.beta_i, p.beta_j}) {
    if (kink > lo && kink < hi) candidates[count++] = kink;
  }
  if (p.eta > 1e-14) {
    for (double si : {-1.0, 1.0}) {
      for (double sj : {-1.0, 1.0}) {
        const double d = -(p.gi - p.gj + p.eps * (si - sj)) / p.eta;
        if (d > lo && d < hi) candidates[count++] = d;
      }
    }
  }
  double best = 0.0;
  double best_value = p.objective(0.0);
  for (std::size_t c = 0; c < count; ++c) {
    const double value = p.objective(candidates[c]);
    if (value < best_value) {
      best_value = value;
      best = candidates[c];
    }
  }
  return best;
}

}  // namespace

fitted::Svr svr_fit(std::span<const double> times, std::span<const double> values_std,
                    const SvrParams& params) {
  const std::size_t n = times.size();
  if (values_std.size() != n || n == 0) {
    throw Error(ErrorCode::DimensionMismatch, "SVR: times and values must be non-empty and equal length");
  }
  const double c = params.c;
  const double eps = params.epsilon;

  std::vector<double> k(n * n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j <= i; ++j) {
      k[i * n + j] = k[j * n + i] = kernel(params.kernel, params.gamma, times[i], times[j]);
    }
  }

  std::vector<double> beta(n, 0.0);
  std::vector<double> grad(values_std.size());
  for (std::size_t i = 0; i < n; ++i) grad[i] = -values_std[i];

  // Slope of the objective when raising (up) or lowering (down) beta_k.
  auto up_slope = [&](std::size_t i) { return grad[i] + (beta[i] >= 0.0 ? eps : -eps); };
  auto down_slope = [&](std::size_t i) { return grad[i] + (beta[i] > 0.0 ? eps : -eps); };

  const std::size_t budget = params.max_passes * n;
  std::size_t iter = 0;
  double up_min = 0.0;
  double down_max = 0.0;
  bool converged = false;
  for (; iter <= budget; ++iter) {
    std::size_t i = n;
    std::size_t j = n;
    up_min = std::numeric_limits<double>::infinity();
    down_max = -std::numeric_limits<double>::infinity();
    for (std::size_t q = 0; q < n; ++q) {
      if (beta[q] < c) {
        const double s = up_slope(q);
        if (s < up_min) {
          up_min = s;
          i = q;
        }
      }
      if (beta[q] > -c) {
        const double s = down_slope(q);
        if (s > down_max) {
          down_max = s;
          j = q;
        }
      }
    }
    if (i == n || j == n || up_min >= down_max - params.tolerance) {
      converged = true;
      break;
    }
    if (iter == budget) break;

    const double lo = std::max(-c - beta[i], beta[j] - c);
    const double hi = std::min(c - beta[i], beta[j] + c);
    const PairProblem pair{beta[i], beta[j], grad[i], grad[j],
                           k[i * n + i] + k[j * n + j] - 2.0 * k[i * n + j], eps};
    const double delta = minimize_pair(pair, std::max(lo, 0.0), hi);
    if (delta == 0.0) break;  // no progress possible in floating point

    beta[i] += delta;
    beta[j] -= delta;
    const double* ki = &k[i * n];
    const double* kj = &k[j * n];
    for (std::size_t q = 0; q < n; ++q) grad[q] += delta * (ki[q] - kj[q]);
  }
  if (!converged) {
    throw Error(ErrorCode::NumericalFailure,
                fmt::format("SVR: SMO did not converge within {} passes (gap {:.3g})",
                            params.max_passes, down_max - up_min));
  }

  fitted::Svr svr;
  svr.times.assign(times.begin(), times.end());
  svr.coef = std::move(beta);
  svr.kernel = params.kernel;
  svr.gamma = params.gamma;
  svr.iterations = iter;
  svr.support_vectors = static_cast<std::size_t>(
      std::count_if(svr.coef.begin(), svr.coef.end(), [](double b) { return b != 0.0; }));
  // Any b in [-up_min, -down_max] satisfies the optimality conditions.
  if (std::isfinite(up_min) && std::isfinite(down_max)) {
    svr.bias = -0.5 * (up_min + down_max);
  } else if (std::isfinite(up_min)) {
    svr.bias = -up_min;
  } else {
    svr.bias = -down_max;
  }
  return svr;
}

double svr_predict(const fitted::Svr& svr, double t) noexcept {
  double s = svr.bias;
  for (std::size_t i = 0; i < svr.times.size(); ++i) {
    if (svr.coef[i] != 0.0) s += svr.coef[i] * kernel(svr.kernel, svr.gamma, t, svr.times[i]);
  }
  return s;
}

}  // namespace gnsspred
