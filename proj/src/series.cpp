#include "gnsspred/series.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include <fmt/format.h>

#include "gnsspred/error.hpp"

namespace gnsspred {

std::string_view to_string(Component c) noexcept {
  return c == Component::First ? "first" : "second";
}

Component parse_component(std::string_view text) {
  std::string lower(text);
  std::transform(lower.begin(), lower.end(), lower.begin(),
                 [](unsigned char ch) { return static_cast<char>(std::tolower(ch)); });
  if (lower == "first" || lower == "x" || lower == "1") return Component::First;
  if (lower == "second" || lower == "y" || lower == "2") return Component::Second;
  throw Error(ErrorCode::BadComponent, fmt::format("unknown component '{}'", text));
}

std::span<const double> component_values(const StationSeries& series, Component c) {
  return c == Component::First ? std::span<const double>(series.first)
                               : std::span<const double>(series.second);
}

TimeMap::TimeMap(double t_first, double t_last_train)
    : t_first_(t_first), t_last_train_(t_last_train) {
  if (!(t_last_train > t_first) || !std::isfinite(t_first) || !std::isfinite(t_last_train)) {
    throw Error(ErrorCode::DegenerateRange,
                fmt::format("time map needs t_last_train > t_first, got [{}, {}]", t_first,
                            t_last_train));
  }
}

std::vector<double> normalize_times(std::span<const double> times, const TimeMap& map) {
  std::vector<double> out(times.size());
  std::transform(times.begin(), times.end(), out.begin(),
                 [&](double t) { return map.normalize(t); });
  return out;
}

std::vector<double> denormalize_times(std::span<const double> normalized, const TimeMap& map) {
  std::vector<double> out(normalized.size());
  std::transform(normalized.begin(), normalized.end(), out.begin(),
                 [&](double u) { return map.denormalize(u); });
  return out;
}

NormalizedSplit split_series(const StationSeries& series, Component component, std::size_t m,
                             std::size_t horizon) {
  if (m < 2 || horizon < 1 || m + horizon > series.length()) {
    throw Error(ErrorCode::InsufficientData,
                fmt::format("station {}: m={} horizon={} needs m>=2, horizon>=1 and "
                            "m+horizon <= {} samples",
                            series.station_id, m, horizon, series.length()));
  }
  const auto values = component_values(series, component);
  const std::span<const double> epochs(series.epochs);

  TimeMap map(epochs[0], epochs[m - 1]);
  NormalizedSplit split{normalize_times(epochs.first(m), map),
                        {values.begin(), values.begin() + static_cast<std::ptrdiff_t>(m)},
                        normalize_times(epochs.subspan(m, horizon), map),
                        {values.begin() + static_cast<std::ptrdiff_t>(m),
                         values.begin() + static_cast<std::ptrdiff_t>(m + horizon)},
                        map};
  // (t - t1)/(tm - t1) is exact at both ends in IEEE arithmetic; pin anyway.
  split.train_times.front() = 0.0;
  split.train_times.back() = 1.0;
  for (double u : split.holdout_times) {
    if (!(u > 1.0)) {
      throw Error(ErrorCode::DegenerateRange,
                  fmt::format("station {}: holdout epoch maps to {} (not beyond the window)",
                              series.station_id, u));
    }
  }
  return split;
}

Standardization Standardization::fit(std::span<const double> values) {
  Standardization s;
  if (values.empty()) return s;
  // Shifted accumulation: a constant series gets its value back exactly.
  const double pivot = values.front();
  double sum = 0.0;
  for (double v : values) sum += v - pivot;
  s.center = pivot + sum / static_cast<double>(values.size());
  double ss = 0.0;
  for (double v : values) ss += (v - s.center) * (v - s.center);
  const double sd = std::sqrt(ss / static_cast<double>(values.size()));
  s.scale = sd < 1e-12 ? 1.0 : sd;
  return s;
}

StandardizedValues standardize_values(std::span<const double> values) {
  StandardizedValues out;
  out.transform = Standardization::fit(values);
  out.values.reserve(values.size());
  for (double v : values) out.values.push_back(out.transform.apply(v));
  return out;
}

}  // namespace gnsspred
