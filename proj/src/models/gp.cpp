// Gaussian process regression: squared-exponential kernel, zero prior mean on
// standardized values, posterior mean only.

#include <cmath>

#include "gnsspred/error.hpp"
#include "gnsspred/models.hpp"

namespace gnsspred {

double se_kernel(double a, double b, double lengthscale, double signal_variance) noexcept {
  const double d = (a - b) / lengthscale;
  return signal_variance * std::exp(-0.5 * d * d);
}

fitted::Gp gp_fit_fixed(std::span<const double> times, std::span<const double> values_std,
                        double lengthscale, double signal_variance, double noise_variance) {
  if (times.size() != values_std.size()) {
    throw Error(ErrorCode::DimensionMismatch, "GP: times and values differ in length");
  }
  const std::size_t n = times.size();
  SymMatrix k(n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < i; ++j) {
      k(i, j) = se_kernel(times[i], times[j], lengthscale, signal_variance);
    }
    k(i, i) = signal_variance + noise_variance;
  }
  const auto factor = cholesky(k, 0.0);
  fitted::Gp gp;
  gp.times.assign(times.begin(), times.end());
  gp.alpha = solve_spd(factor, values_std);
  gp.lengthscale = lengthscale;
  gp.signal_variance = signal_variance;
  gp.noise_variance = noise_variance;
  return gp;
}

double gp_predict(const fitted::Gp& gp, double t) noexcept {
  double s = 0.0;
  for (std::size_t i = 0; i < gp.times.size(); ++i) {
    s += se_kernel(t, gp.times[i], gp.lengthscale, gp.signal_variance) * gp.alpha[i];
  }
  return s;
}

std::vector<double> gp_posterior_mean(std::span<const double> train_times,
                                      std::span<const double> train_values_std,
                                      std::span<const double> query_times, double lengthscale,
                                      double signal_variance, double noise_variance) {
  if (query_times.empty()) return {};
  if (!(lengthscale > 0.0) || !(signal_variance > 0.0) || !(noise_variance >= 0.0)) {
    throw Error(ErrorCode::BadHyperparameters,
                "GP: lengthscale and signal variance must be positive, noise non-negative");
  }
  const auto gp = gp_fit_fixed(train_times, train_values_std, lengthscale, signal_variance,
                               noise_variance);
  std::vector<double> out(query_times.size());
  for (std::size_t i = 0; i < query_times.size(); ++i) out[i] = gp_predict(gp, query_times[i]);
  return out;
}

}  // namespace gnsspred
