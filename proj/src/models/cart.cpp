// Binary regression tree on a single sorted input. Splits maximize the
// reduction in squared error; thresholds sit midway between neighbours.

#include <algorithm>
#include <cmath>
#include <limits>

#include "gnsspred/error.hpp"
#include "gnsspred/models.hpp"

namespace gnsspred {

namespace {

class TreeBuilder {
 public:
  TreeBuilder(std::span<const double> t, std::span<const double> y, const CartParams& p)
      : t_(t), y_(y), params_(p), prefix_(t.size() + 1, 0.0) {
    for (std::size_t i = 0; i < y.size(); ++i) prefix_[i + 1] = prefix_[i] + y[i];
  }

  fitted::Cart build() {
    grow(0, t_.size(), 0);
    return std::move(tree_);
  }

 private:
  double mean(std::size_t lo, std::size_t hi) const {
    const double pivot = y_[lo];
    double s = 0.0;
    for (std::size_t i = lo; i < hi; ++i) s += y_[i] - pivot;
    return pivot + s / static_cast<double>(hi - lo);
  }

  bool pure(std::size_t lo, std::size_t hi) const {
    for (std::size_t i = lo + 1; i < hi; ++i) {
      if (y_[i] != y_[lo]) return false;
    }
    return true;
  }

  std::int32_t grow(std::size_t lo, std::size_t hi, std::size_t depth) {
    const auto id = static_cast<std::int32_t>(tree_.nodes.size());
    tree_.nodes.push_back({});
    tree_.depth = std::max(tree_.depth, depth);

    const std::size_t n = hi - lo;
    const std::size_t min_leaf = params_.min_samples_leaf;
    const bool can_split = depth < params_.max_depth && n >= 2 * min_leaf && !pure(lo, hi);

    std::size_t best = 0;
    if (can_split) {
      // Maximizing S_L^2/n_L + S_R^2/n_R is equivalent to minimizing the
      // children's summed squared error.
      const double total = prefix_[hi] - prefix_[lo];
      double best_gain = -std::numeric_limits<double>::infinity();
      for (std::size_t i = lo + min_leaf; i + min_leaf <= hi; ++i) {
        const double sl = prefix_[i] - prefix_[lo];
        const double sr = total - sl;
        const double gain = sl * sl / static_cast<double>(i - lo) +
                            sr * sr / static_cast<double>(hi - i);
        if (gain > best_gain) {
          best_gain = gain;
          best = i;
        }
      }
    }

    if (best == 0) {
      tree_.nodes[id].value = mean(lo, hi);
      ++tree_.leaves;
      return id;
    }
    const double threshold = 0.5 * (t_[best - 1] + t_[best]);
    const auto left = grow(lo, best, depth + 1);
    const auto right = grow(best, hi, depth + 1);
    auto& node = tree_.nodes[id];
    node.threshold = threshold;
    node.left = left;
    node.right = right;
    node.value = mean(lo, hi);
    return id;
  }

  std::span<const double> t_;
  std::span<const double> y_;
  CartParams params_;
  std::vector<double> prefix_;
  fitted::Cart tree_;
};

}  // namespace

fitted::Cart cart_fit(std::span<const double> times, std::span<const double> values_std,
                      const CartParams& params) {
  if (times.size() != values_std.size() || times.empty()) {
    throw Error(ErrorCode::DimensionMismatch, "CART: times and values must be non-empty and equal length");
  }
  return TreeBuilder(times, values_std, params).build();
}

double cart_predict(const fitted::Cart& cart, double t) noexcept {
  std::int32_t id = 0;
  while (cart.nodes[id].left >= 0) {
    const auto& node = cart.nodes[id];
    id = t <= node.threshold ? node.left : node.right;
  }
  return cart.nodes[id].value;
}

}  // namespace gnsspred
