#include "gnsspred/metrics.hpp"

#include <algorithm>
#include <cmath>

#include <fmt/format.h>

#include "gnsspred/error.hpp"

namespace gnsspred {

namespace {

void check_pair(std::span<const double> predicted, std::span<const double> actual) {
  if (predicted.size() != actual.size()) {
    throw Error(ErrorCode::LengthMismatch,
                fmt::format("{} predictions vs {} observations", predicted.size(), actual.size()));
  }
  if (predicted.empty()) throw Error(ErrorCode::Empty, "no values to score");
}

// Sums in sorted order so the result does not depend on record order.
double order_free_mean(std::vector<double> values) {
  std::sort(values.begin(), values.end());
  double s = 0.0;
  for (double v : values) s += v;
  return s / static_cast<double>(values.size());
}

}  // namespace

double rmse(std::span<const double> predicted, std::span<const double> actual) {
  check_pair(predicted, actual);
  double ss = 0.0;
  for (std::size_t i = 0; i < predicted.size(); ++i) {
    const double e = predicted[i] - actual[i];
    ss += e * e;
  }
  return std::sqrt(ss / static_cast<double>(predicted.size()));
}

double mae(std::span<const double> predicted, std::span<const double> actual) {
  check_pair(predicted, actual);
  double s = 0.0;
  for (std::size_t i = 0; i < predicted.size(); ++i) s += std::abs(predicted[i] - actual[i]);
  return s / static_cast<double>(predicted.size());
}

double naive_mae(std::span<const double> train_values) {
  if (train_values.size() < 2) {
    throw Error(ErrorCode::Empty, "naive forecast needs at least two training values");
  }
  double s = 0.0;
  for (std::size_t i = 1; i < train_values.size(); ++i) {
    s += std::abs(train_values[i] - train_values[i - 1]);
  }
  return s / static_cast<double>(train_values.size() - 1);
}

std::optional<double> mase(std::span<const double> predicted, std::span<const double> actual,
                           std::span<const double> train_values) {
  const double forecast_mae = mae(predicted, actual);
  const double scale = naive_mae(train_values);
  if (!(scale > 0.0)) return std::nullopt;
  return forecast_mae / scale;
}

AveragedMetrics average_over_stations(std::span<const MetricsRecord> records, Component component,
                                      MethodKind method) {
  if (records.empty()) throw Error(ErrorCode::Empty, "no records to average");
  AveragedMetrics avg;
  avg.component = component;
  avg.method = method;
  std::vector<double> mase_values;
  std::vector<double> mae_values;
  std::vector<double> rmse_values;
  for (const auto& r : records) {
    if (r.component != component || r.method != method) {
      throw Error(ErrorCode::MixedKeys,
                  fmt::format("record {}/{}/{} does not match {}/{}", r.station_id,
                              to_string(r.component), to_string(r.method), to_string(component),
                              to_string(method)));
    }
    rmse_values.push_back(r.rmse);
    mae_values.push_back(r.mae);
    if (r.mase) mase_values.push_back(*r.mase);
  }
  avg.station_count = records.size();
  avg.mase_count = mase_values.size();
  avg.rmse_bar = order_free_mean(rmse_values);
  avg.mae_bar = order_free_mean(mae_values);
  if (!mase_values.empty()) avg.mase_bar = order_free_mean(mase_values);
  return avg;
}

}  // namespace gnsspred
