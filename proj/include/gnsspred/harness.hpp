#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "gnsspred/ingest.hpp"
#include "gnsspred/metrics.hpp"
#include "gnsspred/models.hpp"
#include "gnsspred/synth.hpp"

namespace gnsspred {

/// Where station series come from. Every non-empty source contributes.
struct StationSources {
  std::optional<std::filesystem::path> manifest;
  /// Stations listed without a local path are fetched (or read from cache).
  FetchOptions fetch;
  ColumnMapping mapping;
  std::vector<SynthSpec> synth;
  /// Series supplied directly, e.g. by tests.
  std::vector<StationSeries> series;
};

struct ExperimentConfig {
  StationSources sources;
  std::size_t m = 1000;
  std::size_t horizon = 100;
  std::vector<MethodKind> methods{kAllMethods.begin(), kAllMethods.end()};
  Hyperparameters hyperparameters;
  std::uint64_t seed = 42;
  std::filesystem::path output_dir = "gnsspred_out";
  /// 0 = hardware concurrency, 1 = serial.
  std::size_t threads = 0;

  /// Throws ConfigError.
  void validate() const;
};

/// A (station, component, method) cell whose fit or prediction failed.
struct FailedCell {
  std::string station_id;
  Component component = Component::First;
  MethodKind method = MethodKind::MLP;
  std::string error;  // ErrorCode name
  std::string message;
};

struct CellDetail {
  double training_rmse = 0.0;  // meters
  std::string selection;
};

struct BenchmarkReport {
  std::vector<MetricsRecord> records;  // sorted by station, component, method
  std::vector<CellDetail> details;     // parallel to records
  std::vector<FailedCell> failures;
  std::vector<AveragedMetrics> averages;  // sorted by component, method
  // Provenance.
  std::string config_echo;  // JSON text
  std::string version;
  std::string started_at;
  std::string finished_at;
};

/// Resolves every source into validated series (manifest order, then synth,
/// then directly supplied series). Throws on duplicate station ids.
std::vector<StationSeries> load_stations(const StationSources& sources);

/// Splits, fits, predicts and scores every (station, component, method) cell
/// and averages per (component, method). Each cell draws from a stream keyed
/// by (seed, station, component, method), so results do not depend on task
/// order or thread count. Throws StationTooShortError.
BenchmarkReport run_experiment(const ExperimentConfig& config);
BenchmarkReport run_experiment(const ExperimentConfig& config,
                               const std::vector<StationSeries>& stations);

RngStream cell_stream(std::uint64_t seed, std::string_view station_id, Component component,
                      MethodKind method) noexcept;

/// Averages for every (component, method) pair present in `records`.
std::vector<AveragedMetrics> average_all(std::span<const MetricsRecord> records);

enum class Metric { MASE, MAE, RMSE };
std::string_view to_string(Metric metric) noexcept;
Metric parse_metric(std::string_view text);

/// Methods ascending by the averaged metric (undefined MASE sorts last);
/// ties keep the listing order. Throws Empty when no averages exist.
std::vector<MethodKind> rank_methods(const BenchmarkReport& report, Metric metric,
                                     Component component);

/// Name of the table for (metric, component), e.g. "first_rmse.csv".
std::string figure_table_name(Metric metric, Component component);

/// Text of one figure table: header `method,<metric>_bar,stations`, one row per
/// method in listing order.
std::string figure_table(const BenchmarkReport& report, Metric metric, Component component);

/// Writes the six figure tables into `dir`; returns their paths in the order
/// first MASE, MAE, RMSE, second MASE, MAE, RMSE. Throws IoError.
std::vector<std::filesystem::path> emit_figure_tables(const BenchmarkReport& report,
                                                      const std::filesystem::path& dir);

/// Per-record dump (one row per station, component, method, failures included).
std::string records_table(const BenchmarkReport& report);

/// Full report as JSON. Without provenance timestamps the payload is a pure
/// function of the configuration.
std::string report_to_json(const BenchmarkReport& report, bool include_timestamps = true);
BenchmarkReport report_from_json(std::string_view text);

/// report.json, records.csv and the six figure tables.
void write_report(const BenchmarkReport& report, const std::filesystem::path& dir);

}  // namespace gnsspred
