#include <fmt/format.h>
#include <json.hpp>

#include "gnsspred/error.hpp"
#include "gnsspred/harness.hpp"

namespace gnsspred {

namespace {

using json = nlohmann::ordered_json;

json optional_number(const std::optional<double>& v) {
  return v ? json(*v) : json(nullptr);
}

std::optional<double> read_optional(const json& j) {
  if (j.is_null()) return std::nullopt;
  return j.get<double>();
}

}  // namespace

std::string report_to_json(const BenchmarkReport& report, bool include_timestamps) {
  json j;
  auto& provenance = j["provenance"];
  provenance["tool"] = "gnsspred";
  provenance["version"] = report.version;
  if (include_timestamps) {
    provenance["started_at"] = report.started_at;
    provenance["finished_at"] = report.finished_at;
  }
  provenance["config"] = report.config_echo.empty() ? json::object() : json::parse(report.config_echo);

  auto& records = j["records"] = json::array();
  for (std::size_t i = 0; i < report.records.size(); ++i) {
    const auto& r = report.records[i];
    json row;
    row["station"] = r.station_id;
    row["component"] = std::string(to_string(r.component));
    row["method"] = std::string(to_string(r.method));
    row["rmse_m"] = r.rmse;
    row["mae_m"] = r.mae;
    row["mase"] = optional_number(r.mase);
    row["mase_status"] = r.mase ? "ok" : "ZeroDenominator";
    if (i < report.details.size()) {
      row["training_rmse_m"] = report.details[i].training_rmse;
      row["selection"] = report.details[i].selection;
    }
    records.push_back(std::move(row));
  }

  auto& failures = j["failures"] = json::array();
  for (const auto& f : report.failures) {
    failures.push_back({{"station", f.station_id},
                        {"component", std::string(to_string(f.component))},
                        {"method", std::string(to_string(f.method))},
                        {"error", f.error},
                        {"message", f.message}});
  }

  auto& averages = j["averages"] = json::array();
  for (const auto& a : report.averages) {
    averages.push_back({{"component", std::string(to_string(a.component))},
                        {"method", std::string(to_string(a.method))},
                        {"mase_bar", optional_number(a.mase_bar)},
                        {"mae_bar_m", a.mae_bar},
                        {"rmse_bar_m", a.rmse_bar},
                        {"station_count", a.station_count},
                        {"mase_count", a.mase_count}});
  }
  return j.dump(2) + "\n";
}

BenchmarkReport report_from_json(std::string_view text) {
  BenchmarkReport report;
  try {
    const auto j = json::parse(text);
    const auto& p = j.at("provenance");
    report.version = p.value("version", "");
    report.started_at = p.value("started_at", "");
    report.finished_at = p.value("finished_at", "");
    if (p.contains("config")) report.config_echo = p.at("config").dump(2);
    for (const auto& row : j.at("records")) {
      MetricsRecord r;
      r.station_id = row.at("station").get<std::string>();
      r.component = parse_component(row.at("component").get<std::string>());
      r.method = parse_method(row.at("method").get<std::string>());
      r.rmse = row.at("rmse_m").get<double>();
      r.mae = row.at("mae_m").get<double>();
      r.mase = read_optional(row.at("mase"));
      report.records.push_back(std::move(r));
      report.details.push_back({row.value("training_rmse_m", 0.0), row.value("selection", "")});
    }
    for (const auto& row : j.at("failures")) {
      report.failures.push_back({row.at("station").get<std::string>(),
                                 parse_component(row.at("component").get<std::string>()),
                                 parse_method(row.at("method").get<std::string>()),
                                 row.at("error").get<std::string>(), row.value("message", "")});
    }
    for (const auto& row : j.at("averages")) {
      AveragedMetrics a;
      a.component = parse_component(row.at("component").get<std::string>());
      a.method = parse_method(row.at("method").get<std::string>());
      a.mase_bar = read_optional(row.at("mase_bar"));
      a.mae_bar = row.at("mae_bar_m").get<double>();
      a.rmse_bar = row.at("rmse_bar_m").get<double>();
      a.station_count = row.at("station_count").get<std::size_t>();
      a.mase_count = row.at("mase_count").get<std::size_t>();
      report.averages.push_back(a);
    }
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::ParseError, fmt::format("report JSON: {}", e.what()));
  }
  return report;
}

void write_report(const BenchmarkReport& report, const std::filesystem::path& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw Error(ErrorCode::IoError, fmt::format("cannot create {}: {}", dir.string(), ec.message()));
  atomic_write(dir / "report.json", report_to_json(report));
  atomic_write(dir / "records.csv", records_table(report));
  emit_figure_tables(report, dir);
}

}  // namespace gnsspred
