#pragma once

#include <span>
#include <string_view>
#include <vector>

#include "gnsspred/ingest.hpp"

namespace gnsspred {

enum class Component { First, Second };

inline constexpr Component kComponents[] = {Component::First, Component::Second};

std::string_view to_string(Component c) noexcept;
/// Accepts first/second (also x/y, 1/2), case-insensitive. Throws BadComponent.
Component parse_component(std::string_view text);

std::span<const double> component_values(const StationSeries& series, Component c);

/// Affine map from decimal years onto the training window: t_first -> 0,
/// t_last_train -> 1. Times past the window map above 1.
class TimeMap {
 public:
  /// Throws DegenerateRange unless t_last_train > t_first.
  TimeMap(double t_first, double t_last_train);

  double t_first() const noexcept { return t_first_; }
  double t_last_train() const noexcept { return t_last_train_; }

  double normalize(double t) const noexcept { return (t - t_first_) / (t_last_train_ - t_first_); }
  double denormalize(double u) const noexcept { return t_first_ + u * (t_last_train_ - t_first_); }

 private:
  double t_first_;
  double t_last_train_;
};

std::vector<double> normalize_times(std::span<const double> times, const TimeMap& map);
std::vector<double> denormalize_times(std::span<const double> normalized, const TimeMap& map);

struct NormalizedSplit {
  std::vector<double> train_times;  // [0, 1], first exactly 0, last exactly 1
  std::vector<double> train_values; // meters
  std::vector<double> holdout_times; // all > 1
  std::vector<double> holdout_values;
  TimeMap time_map;

  std::size_t m() const noexcept { return train_times.size(); }
};

/// First `m` samples train, the next `horizon` samples are held out.
/// Throws InsufficientData when m < 2, horizon < 1 or m + horizon > length.
NormalizedSplit split_series(const StationSeries& series, Component component, std::size_t m,
                             std::size_t horizon);

/// Mean/population-std standardization; scale falls back to 1 below 1e-12.
struct Standardization {
  double center = 0.0;
  double scale = 1.0;

  double apply(double v) const noexcept { return (v - center) / scale; }
  double invert(double z) const noexcept { return z * scale + center; }

  static Standardization fit(std::span<const double> values);
};

struct StandardizedValues {
  std::vector<double> values;
  Standardization transform;
};

StandardizedValues standardize_values(std::span<const double> values);

}  // namespace gnsspred
