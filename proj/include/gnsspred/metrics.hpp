#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "gnsspred/models.hpp"
#include "gnsspred/series.hpp"

namespace gnsspred {

/// sqrt(mean((p - a)^2)). Throws LengthMismatch or Empty.
double rmse(std::span<const double> predicted, std::span<const double> actual);

/// mean(|p - a|). Throws LengthMismatch or Empty.
double mae(std::span<const double> predicted, std::span<const double> actual);

/// Mean one-step naive-forecast absolute error over the training window.
/// Throws Empty when fewer than two training values are given.
double naive_mae(std::span<const double> train_values);

/// Forecast MAE scaled by the in-sample naive MAE. Returns nullopt (the
/// ZeroDenominator sentinel) when the training series is constant.
std::optional<double> mase(std::span<const double> predicted, std::span<const double> actual,
                           std::span<const double> train_values);

struct MetricsRecord {
  std::string station_id;
  Component component = Component::First;
  MethodKind method = MethodKind::MLP;
  double rmse = 0.0;               // meters
  double mae = 0.0;                // meters
  std::optional<double> mase;      // nullopt: zero naive-MAE denominator
};

struct AveragedMetrics {
  Component component = Component::First;
  MethodKind method = MethodKind::MLP;
  std::optional<double> mase_bar;  // nullopt when no record has a defined MASE
  double mae_bar = 0.0;
  double rmse_bar = 0.0;
  std::size_t station_count = 0;
  std::size_t mase_count = 0;      // records contributing to mase_bar
};

/// Unweighted means over stations. Records with an undefined MASE still
/// count for RMSE/MAE but are left out of mase_bar. Throws Empty or MixedKeys.
AveragedMetrics average_over_stations(std::span<const MetricsRecord> records, Component component,
                                      MethodKind method);

}  // namespace gnsspred
