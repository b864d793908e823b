// Local averaging forecasters on the time axis: k-nearest neighbours and the
// generalized regression neural network (Nadaraya-Watson, Gaussian kernel).

#include <algorithm>
#include <cmath>
#include <limits>

#include "gnsspred/models.hpp"

namespace gnsspred {

double knn_predict(const fitted::Knn& knn, double t) noexcept {
  const auto& times = knn.times;
  const std::size_t n = times.size();
  const std::size_t k = std::min(knn.k, n);
  // Two-pointer walk outwards from the insertion point; on equal distance
  // the earlier index wins.
  std::size_t right = static_cast<std::size_t>(std::lower_bound(times.begin(), times.end(), t) - times.begin());
  std::size_t left = right;  // next candidate on the left is left - 1

  double sum = 0.0;
  double weight_sum = 0.0;
  for (std::size_t taken = 0; taken < k; ++taken) {
    std::size_t pick;
    if (left == 0) {
      pick = right++;
    } else if (right >= n) {
      pick = --left;
    } else {
      const double dl = t - times[left - 1];
      const double dr = times[right] - t;
      pick = dl <= dr ? --left : right++;
    }
    const double d = std::abs(t - times[pick]);
    if (knn.weighting == KnnWeighting::Uniform) {
      sum += knn.values[pick];
      weight_sum += 1.0;
    } else {
      if (d == 0.0) return knn.values[pick];
      sum += knn.values[pick] / d;
      weight_sum += 1.0 / d;
    }
  }
  return sum / weight_sum;
}

double grnn_predict(const fitted::Grnn& grnn, double t) noexcept {
  // Weights are shifted by the nearest squared distance so that tiny
  // bandwidths degrade to the nearest neighbour instead of 0/0.
  double d2_min = std::numeric_limits<double>::infinity();
  for (double ti : grnn.times) d2_min = std::min(d2_min, (t - ti) * (t - ti));
  const double inv_two_var = 1.0 / (2.0 * grnn.bandwidth * grnn.bandwidth);
  double num = 0.0;
  double den = 0.0;
  for (std::size_t i = 0; i < grnn.times.size(); ++i) {
    const double d2 = (t - grnn.times[i]) * (t - grnn.times[i]);
    const double w = std::exp(-(d2 - d2_min) * inv_two_var);
    num += w * grnn.values[i];
    den += w;
  }
  return num / den;
}

}  // namespace gnsspred
