#include "gnsspred/harness.hpp"

#include <algorithm>
#include <array>
#include <atomic>
#include <chrono>
#include <cmath>
#include <ctime>
#include <map>
#include <set>
#include <tuple>
#include <thread>

#include <fmt/format.h>

#include "gnsspred/config.hpp"
#include "gnsspred/error.hpp"

namespace gnsspred {

void ExperimentConfig::validate() const {
  if (methods.empty()) throw Error(ErrorCode::ConfigError, "no methods selected");
  if (m < 2) throw Error(ErrorCode::ConfigError, fmt::format("m must be >= 2 (got {})", m));
  if (horizon < 1) throw Error(ErrorCode::ConfigError, "horizon must be >= 1");
  for (auto kind : methods) {
    try {
      hyperparameters.validate(kind);
    } catch (const Error& e) {
      throw Error(ErrorCode::ConfigError, e.what());
    }
  }
}

std::vector<StationSeries> load_stations(const StationSources& sources) {
  std::vector<StationSeries> out;
  if (sources.manifest) {
    const auto base = sources.manifest->parent_path();
    for (const auto& entry : load_manifest(*sources.manifest)) {
      ParsedStation parsed;
      if (entry.local_path) {
        auto path = *entry.local_path;
        if (path.is_relative()) path = base / path;
        parsed = read_station_file(path, sources.mapping);
      } else {
        parsed = parse_cartesian_file(fetch_station(entry.station_id, sources.fetch), sources.mapping);
      }
      if (parsed.series.station_id != entry.station_id) {
        throw Error(ErrorCode::InconsistentStation,
                    fmt::format("manifest lists {} but its file holds station {}", entry.station_id,
                                parsed.series.station_id));
      }
      out.push_back(std::move(parsed.series));
    }
  }
  for (const auto& spec : sources.synth) out.push_back(generate(spec));
  for (const auto& series : sources.series) {
    series.validate();
    out.push_back(series);
  }
  std::set<std::string, std::less<>> ids;
  for (const auto& s : out) {
    if (!ids.insert(s.station_id).second) {
      throw Error(ErrorCode::DuplicateStation, fmt::format("station {} appears twice", s.station_id));
    }
  }
  if (out.empty()) throw Error(ErrorCode::ConfigError, "no stations configured");
  return out;
}

RngStream cell_stream(std::uint64_t seed, std::string_view station_id, Component component,
                      MethodKind method) noexcept {
  return RngStream(seed, hash_string(station_id))
      .fork(static_cast<std::uint64_t>(component))
      .fork(to_string(method));
}

namespace {

std::string utc_now() {
  const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

struct Task {
  std::size_t station = 0;
  Component component = Component::First;
  MethodKind method = MethodKind::MLP;
};

struct TaskResult {
  std::optional<MetricsRecord> record;
  CellDetail detail;
  std::optional<FailedCell> failure;
};

auto cell_key(const std::string& station, Component c, MethodKind m) {
  return std::make_tuple(station, static_cast<int>(c), listing_index(m));
}

}  // namespace

BenchmarkReport run_experiment(const ExperimentConfig& config) {
  config.validate();
  return run_experiment(config, load_stations(config.sources));
}

BenchmarkReport run_experiment(const ExperimentConfig& config,
                               const std::vector<StationSeries>& stations) {
  config.validate();
  BenchmarkReport report;
  report.started_at = utc_now();
  report.version = GNSSPRED_VERSION;

  std::vector<std::string> too_short;
  for (const auto& s : stations) {
    if (s.length() < config.m + config.horizon) too_short.push_back(s.station_id);
  }
  if (!too_short.empty()) {
    std::string names;
    for (const auto& id : too_short) names += (names.empty() ? "" : ", ") + id;
    throw StationTooShortError(
        fmt::format("stations shorter than m + horizon = {}: {}", config.m + config.horizon, names),
        too_short);
  }

  // Splits are shared read-only across tasks.
  std::vector<std::array<NormalizedSplit, 2>> splits;
  splits.reserve(stations.size());
  for (const auto& s : stations) {
    splits.push_back({split_series(s, Component::First, config.m, config.horizon),
                      split_series(s, Component::Second, config.m, config.horizon)});
  }

  std::vector<MethodKind> methods = config.methods;
  std::sort(methods.begin(), methods.end(),
            [](MethodKind a, MethodKind b) { return listing_index(a) < listing_index(b); });

  std::vector<Task> tasks;
  for (std::size_t s = 0; s < stations.size(); ++s) {
    for (auto c : kComponents) {
      for (auto m : methods) tasks.push_back({s, c, m});
    }
  }

  std::vector<TaskResult> results(tasks.size());
  auto run_task = [&](std::size_t index) {
    const auto& task = tasks[index];
    const auto& station = stations[task.station];
    const auto& split = splits[task.station][task.component == Component::First ? 0 : 1];
    TaskResult& out = results[index];
    try {
      const auto model = fit(task.method, config.hyperparameters, split.train_times,
                             split.train_values,
                             cell_stream(config.seed, station.station_id, task.component, task.method));
      const auto predicted = model.predict(split.holdout_times);
      for (double v : predicted) {
        if (!std::isfinite(v)) throw Error(ErrorCode::NumericalFailure, "non-finite forecast");
      }
      MetricsRecord r;
      r.station_id = station.station_id;
      r.component = task.component;
      r.method = task.method;
      r.rmse = rmse(predicted, split.holdout_values);
      r.mae = mae(predicted, split.holdout_values);
      r.mase = mase(predicted, split.holdout_values, split.train_values);
      out.record = std::move(r);
      out.detail = {model.training_rmse(), model.selection()};
    } catch (const Error& e) {
      out.failure = FailedCell{station.station_id, task.component, task.method,
                               std::string(to_string(e.code())), e.what()};
    } catch (const std::exception& e) {
      out.failure = FailedCell{station.station_id, task.component, task.method, "Exception", e.what()};
    }
  };

  std::size_t threads = config.threads == 0 ? std::max(1u, std::thread::hardware_concurrency())
                                            : config.threads;
  threads = std::min(threads, tasks.size());
  if (threads <= 1) {
    for (std::size_t i = 0; i < tasks.size(); ++i) run_task(i);
  } else {
    std::atomic<std::size_t> next{0};
    std::vector<std::jthread> pool;
    pool.reserve(threads);
    for (std::size_t w = 0; w < threads; ++w) {
      pool.emplace_back([&] {
        for (std::size_t i = next.fetch_add(1); i < tasks.size(); i = next.fetch_add(1)) run_task(i);
      });
    }
  }

  // Deterministic assembly: canonical (station, component, method) order.
  std::vector<std::size_t> order(tasks.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return cell_key(stations[tasks[a].station].station_id, tasks[a].component, tasks[a].method) <
           cell_key(stations[tasks[b].station].station_id, tasks[b].component, tasks[b].method);
  });
  for (auto i : order) {
    if (results[i].record) {
      report.records.push_back(std::move(*results[i].record));
      report.details.push_back(std::move(results[i].detail));
    } else if (results[i].failure) {
      report.failures.push_back(std::move(*results[i].failure));
    }
  }
  report.averages = average_all(report.records);

  ExperimentConfig echo = config;
  echo.methods = methods;
  report.config_echo = config_to_json(echo);
  report.finished_at = utc_now();
  return report;
}

std::vector<AveragedMetrics> average_all(std::span<const MetricsRecord> records) {
  std::map<std::pair<int, std::size_t>, std::vector<MetricsRecord>> groups;
  for (const auto& r : records) {
    groups[{static_cast<int>(r.component), listing_index(r.method)}].push_back(r);
  }
  std::vector<AveragedMetrics> out;
  for (const auto& [key, group] : groups) {
    out.push_back(average_over_stations(group, group.front().component, group.front().method));
  }
  return out;
}

std::string_view to_string(Metric metric) noexcept {
  switch (metric) {
    case Metric::MASE: return "mase";
    case Metric::MAE: return "mae";
    case Metric::RMSE: return "rmse";
  }
  return "?";
}

Metric parse_metric(std::string_view text) {
  std::string lower(text);
  std::transform(lower.begin(), lower.end(), lower.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  if (lower == "mase") return Metric::MASE;
  if (lower == "mae") return Metric::MAE;
  if (lower == "rmse") return Metric::RMSE;
  throw Error(ErrorCode::ConfigError, fmt::format("unknown metric '{}'", text));
}

namespace {

std::optional<double> metric_value(const AveragedMetrics& a, Metric metric) {
  switch (metric) {
    case Metric::MASE: return a.mase_bar;
    case Metric::MAE: return a.mae_bar;
    case Metric::RMSE: return a.rmse_bar;
  }
  return std::nullopt;
}

std::vector<const AveragedMetrics*> component_rows(const BenchmarkReport& report, Component c) {
  std::vector<const AveragedMetrics*> rows;
  for (const auto& a : report.averages) {
    if (a.component == c) rows.push_back(&a);
  }
  std::sort(rows.begin(), rows.end(), [](const auto* x, const auto* y) {
    return listing_index(x->method) < listing_index(y->method);
  });
  return rows;
}

}  // namespace

std::vector<MethodKind> rank_methods(const BenchmarkReport& report, Metric metric,
                                     Component component) {
  auto rows = component_rows(report, component);
  if (rows.empty()) {
    throw Error(ErrorCode::Empty,
                fmt::format("no averaged results for the {} component", to_string(component)));
  }
  std::stable_sort(rows.begin(), rows.end(), [&](const auto* x, const auto* y) {
    const auto vx = metric_value(*x, metric);
    const auto vy = metric_value(*y, metric);
    if (!vx) return false;
    if (!vy) return true;
    return *vx < *vy;
  });
  std::vector<MethodKind> out;
  for (const auto* r : rows) out.push_back(r->method);
  return out;
}

std::string figure_table_name(Metric metric, Component component) {
  return fmt::format("{}_{}.csv", to_string(component), to_string(metric));
}

std::string figure_table(const BenchmarkReport& report, Metric metric, Component component) {
  std::string out = fmt::format("method,{}_bar{},stations\n", to_string(metric),
                                metric == Metric::MASE ? "" : "_m");
  for (const auto* row : component_rows(report, component)) {
    const auto value = metric_value(*row, metric);
    std::string cell = "NA";
    if (value) cell = metric == Metric::MASE ? fmt::format("{:.4f}", *value) : fmt::format("{:.6f}", *value);
    const std::size_t count = metric == Metric::MASE ? row->mase_count : row->station_count;
    out += fmt::format("{},{},{}\n", to_string(row->method), cell, count);
  }
  return out;
}

std::vector<std::filesystem::path> emit_figure_tables(const BenchmarkReport& report,
                                                      const std::filesystem::path& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw Error(ErrorCode::IoError, fmt::format("cannot create {}: {}", dir.string(), ec.message()));
  std::vector<std::filesystem::path> paths;
  for (auto component : kComponents) {
    for (auto metric : {Metric::MASE, Metric::MAE, Metric::RMSE}) {
      const auto path = dir / figure_table_name(metric, component);
      atomic_write(path, figure_table(report, metric, component));
      paths.push_back(path);
    }
  }
  return paths;
}

std::string records_table(const BenchmarkReport& report) {
  std::string out = "station,component,method,rmse_m,mae_m,mase,training_rmse_m,status\n";
  for (std::size_t i = 0; i < report.records.size(); ++i) {
    const auto& r = report.records[i];
    const auto& d = report.details[i];
    out += fmt::format("{},{},{},{:.6f},{:.6f},{},{:.6f},{}\n", r.station_id, to_string(r.component),
                       to_string(r.method), r.rmse, r.mae,
                       r.mase ? fmt::format("{:.4f}", *r.mase) : std::string("NA"), d.training_rmse,
                       r.mase ? "ok" : "ZeroDenominator");
  }
  for (const auto& f : report.failures) {
    out += fmt::format("{},{},{},NA,NA,NA,NA,{}\n", f.station_id, to_string(f.component),
                       to_string(f.method), f.error);
  }
  return out;
}

}  // namespace gnsspred
