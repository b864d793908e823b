#include "gnsspred/cli.hpp"

#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <optional>
#include <ostream>

#include <CLI11.hpp>
#include <fmt/format.h>

#include "gnsspred/config.hpp"
#include "gnsspred/error.hpp"
#include "gnsspred/harness.hpp"

namespace gnsspred {

namespace {

namespace fs = std::filesystem;

struct RunFlags {
  std::string config;
  std::string positional_config;
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> m;
  std::optional<std::size_t> horizon;
  std::optional<std::string> methods;
  std::optional<std::size_t> threads;
  bool offline = false;
  std::string out;
  std::string base_url;
  std::string cache_dir;
};

struct FetchFlags {
  std::string manifest;
  std::string config;
  std::string base_url;
  std::string cache_dir;
  bool offline = false;
};

struct SynthFlags {
  std::string spec;
  std::string out = ".";
};

struct ReportFlags {
  std::string input;
  std::string out;
};

// Usage errors detected after CLI11 parsing.
struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

void apply_cache_default(FetchOptions& fetch) {
  if (fetch.cache_dir != FetchOptions{}.cache_dir) return;
  if (const char* env = std::getenv(kCacheDirEnv); env && *env) fetch.cache_dir = env;
}

void print_rankings(const BenchmarkReport& report, std::ostream& out) {
  for (auto comp : kComponents) {
    std::vector<MethodKind> ranked;
    try {
      ranked = rank_methods(report, Metric::RMSE, comp);
    } catch (const Error&) {
      out << fmt::format("{} rmse ranking: no results\n", to_string(comp));
      continue;
    }
    out << fmt::format("{} rmse ranking:", to_string(comp));
    for (auto kind : ranked) {
      for (const auto& a : report.averages) {
        if (a.component == comp && a.method == kind) {
          out << fmt::format(" {}={:.6f}", to_string(kind), a.rmse_bar);
        }
      }
    }
    out << "\n";
  }
}

int cmd_fetch(const FetchFlags& flags, std::ostream& out, std::ostream& err) {
  FetchOptions fetch;
  std::optional<fs::path> manifest;
  if (!flags.config.empty()) {
    auto config = load_experiment_config(flags.config);
    fetch = config.sources.fetch;
    manifest = config.sources.manifest;
  }
  if (!flags.manifest.empty()) manifest = fs::path(flags.manifest);
  if (!manifest) throw UsageError("fetch needs --manifest or a config naming one");
  if (!flags.base_url.empty()) fetch.base_url = flags.base_url;
  if (!flags.cache_dir.empty()) fetch.cache_dir = flags.cache_dir;
  if (flags.offline) fetch.offline = true;
  apply_cache_default(fetch);

  std::vector<StationDescriptor> stations;
  try {
    stations = load_manifest(*manifest);
  } catch (const Error& e) {
    if (e.code() == ErrorCode::Empty) throw UsageError(fmt::format("{}: {}", manifest->string(), e.what()));
    throw;
  }
  std::size_t failed = 0;
  for (const auto& s : stations) {
    if (s.local_path) {
      out << fmt::format("{}: local file {}\n", s.station_id, s.local_path->string());
      continue;
    }
    try {
      const auto text = fetch_station(s.station_id, fetch);
      out << fmt::format("{}: ok ({} bytes) {}\n", s.station_id, text.size(),
                         cache_path(fetch, s.station_id).string());
    } catch (const Error& e) {
      ++failed;
      err << fmt::format("{}: {}: {}\n", s.station_id, to_string(e.code()), e.what());
    }
  }
  if (failed > 0) {
    err << fmt::format("{} of {} stations failed\n", failed, stations.size());
    return kExitFailure;
  }
  return kExitOk;
}

int cmd_synth(const SynthFlags& flags, std::ostream& out, std::ostream&) {
  const auto specs = load_synth_specs(flags.spec);
  if (specs.empty()) throw UsageError(fmt::format("{}: no station specs", flags.spec));
  const fs::path dir = flags.out;
  std::string manifest = "# station local_path\n";
  for (const auto& spec : specs) {
    const auto name = spec.station_id + FetchOptions{}.suffix;
    write_station_file(dir / name, generate(spec));
    manifest += fmt::format("{} {}\n", spec.station_id, name);
    out << fmt::format("{}: {} epochs -> {}\n", spec.station_id, spec.length, (dir / name).string());
  }
  atomic_write(dir / "manifest.txt", manifest);
  return kExitOk;
}

int cmd_run(const RunFlags& flags, std::ostream& out, std::ostream& err) {
  if (!flags.config.empty() && !flags.positional_config.empty()) {
    throw UsageError("give the config either positionally or with --config, not both");
  }
  const std::string path = flags.config.empty() ? flags.positional_config : flags.config;
  if (path.empty()) throw UsageError("run needs a config file");
  auto config = load_experiment_config(path);
  if (flags.seed) config.seed = *flags.seed;
  if (flags.m) config.m = *flags.m;
  if (flags.horizon) config.horizon = *flags.horizon;
  if (flags.methods) apply_setting(config, "methods", *flags.methods);
  if (flags.threads) config.threads = *flags.threads;
  if (flags.offline) config.sources.fetch.offline = true;
  if (!flags.out.empty()) config.output_dir = flags.out;
  if (!flags.base_url.empty()) config.sources.fetch.base_url = flags.base_url;
  if (!flags.cache_dir.empty()) config.sources.fetch.cache_dir = flags.cache_dir;
  apply_cache_default(config.sources.fetch);

  const auto report = run_experiment(config);
  write_report(report, config.output_dir);
  out << fmt::format("{} records, {} failed cells, output in {}\n", report.records.size(),
                     report.failures.size(), config.output_dir.string());
  for (const auto& f : report.failures) {
    err << fmt::format("{} {} {}: {}: {}\n", f.station_id, to_string(f.component), to_string(f.method),
                       f.error, f.message);
  }
  print_rankings(report, out);
  return kExitOk;
}

int cmd_report(const ReportFlags& flags, std::ostream& out, std::ostream&) {
  fs::path input = flags.input;
  if (fs::is_directory(input)) input /= "report.json";
  const auto report = report_from_json(read_text_file(input));
  const fs::path dir = flags.out.empty() ? input.parent_path() : fs::path(flags.out);
  for (const auto& p : emit_figure_tables(report, dir)) out << p.string() << "\n";
  print_rankings(report, out);
  return kExitOk;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"GNSS station position forecasting benchmark", "gnsspred"};
  app.require_subcommand(1, 1);
  app.set_version_flag("--version", GNSSPRED_VERSION);

  FetchFlags fetch_flags;
  auto* fetch = app.add_subcommand("fetch", "Download station files into the cache");
  fetch->add_option("--manifest,manifest", fetch_flags.manifest, "Station manifest");
  fetch->add_option("--config", fetch_flags.config, "Experiment config (for manifest and fetch.* keys)");
  fetch->add_option("--base-url", fetch_flags.base_url, "Remote directory holding station files");
  fetch->add_option("--cache-dir", fetch_flags.cache_dir, "Cache directory");
  fetch->add_flag("--offline", fetch_flags.offline, "Never touch the network");

  SynthFlags synth_flags;
  auto* synth = app.add_subcommand("synth", "Write synthetic station files from a spec file");
  synth->add_option("--spec,spec", synth_flags.spec, "Synthetic station spec file")->required();
  synth->add_option("--out", synth_flags.out, "Output directory");

  RunFlags run_flags;
  auto* run = app.add_subcommand("run", "Run the benchmark and write the report");
  run->add_option("--config", run_flags.config, "Experiment config");
  run->add_option("config_path", run_flags.positional_config, "Experiment config");
  run->add_option("--seed", run_flags.seed, "Master seed");
  run->add_option("--m", run_flags.m, "Training window length");
  run->add_option("--horizon", run_flags.horizon, "Forecast horizon");
  run->add_option("--methods", run_flags.methods, "Comma-separated methods");
  run->add_option("--threads", run_flags.threads, "Worker threads (0 = all cores, 1 = serial)");
  run->add_flag("--offline", run_flags.offline, "Never touch the network");
  run->add_option("--out", run_flags.out, "Output directory");
  run->add_option("--base-url", run_flags.base_url, "Remote directory holding station files");
  run->add_option("--cache-dir", run_flags.cache_dir, "Cache directory");

  ReportFlags report_flags;
  auto* report = app.add_subcommand("report", "Rebuild figure tables and rankings from report.json");
  report->add_option("input", report_flags.input, "report.json or its directory")->required();
  report->add_option("--out", report_flags.out, "Output directory for the tables");

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::CallForVersion&) {
    out << GNSSPRED_VERSION << "\n";
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "gnsspred: " << e.what() << "\n";
    return kExitUsage;
  }

  try {
    if (fetch->parsed()) return cmd_fetch(fetch_flags, out, err);
    if (synth->parsed()) return cmd_synth(synth_flags, out, err);
    if (run->parsed()) return cmd_run(run_flags, out, err);
    return cmd_report(report_flags, out, err);
  } catch (const UsageError& e) {
    err << "gnsspred: " << e.what() << "\n";
    return kExitUsage;
  } catch (const Error& e) {
    err << fmt::format("gnsspred: {}: {}\n", to_string(e.code()), e.what());
    return kExitFailure;
  } catch (const std::exception& e) {
    err << "gnsspred: " << e.what() << "\n";
    return kExitFailure;
  }
}

}  // namespace gnsspred
