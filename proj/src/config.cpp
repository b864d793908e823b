#include "gnsspred/config.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <map>
#include <set>

#include <fmt/format.h>
#include <json.hpp>

#include "gnsspred/error.hpp"
#include "text.hpp"

namespace gnsspred {

namespace {

using Setter = std::function<void(ExperimentConfig&, std::string_view, const std::filesystem::path&)>;

[[noreturn]] void bad_value(std::string_view key, std::string_view value, std::string_view want) {
  throw Error(ErrorCode::ConfigError,
              fmt::format("{}: '{}' is not {}", key, value, want));
}

double as_double(std::string_view key, std::string_view value) {
  const auto v = detail::parse_double(detail::trim(value));
  if (!v || std::isnan(*v)) bad_value(key, value, "a number");
  return *v;
}

std::size_t as_count(std::string_view key, std::string_view value) {
  const auto v = detail::parse_uint(detail::trim(value));
  if (!v) bad_value(key, value, "a non-negative integer");
  return static_cast<std::size_t>(*v);
}

std::uint64_t as_u64(std::string_view key, std::string_view value) {
  const auto v = detail::parse_uint(detail::trim(value));
  if (!v) bad_value(key, value, "a non-negative integer");
  return *v;
}

bool as_bool(std::string_view key, std::string_view value) {
  std::string v(detail::trim(value));
  std::transform(v.begin(), v.end(), v.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  if (v == "true" || v == "yes" || v == "on" || v == "1") return true;
  if (v == "false" || v == "no" || v == "off" || v == "0") return false;
  bad_value(key, value, "a boolean");
}

std::vector<double> as_list(std::string_view key, std::string_view value) {
  std::vector<double> out;
  for (auto item : detail::split_on(value, ',')) {
    if (item.empty()) continue;
    out.push_back(as_double(key, item));
  }
  if (out.empty()) bad_value(key, value, "a non-empty list of numbers");
  return out;
}

std::optional<std::size_t> as_optional_column(std::string_view key, std::string_view value) {
  const auto v = detail::trim(value);
  if (v == "none" || v == "-") return std::nullopt;
  return as_count(key, v);
}

std::filesystem::path as_path(std::string_view value, const std::filesystem::path& base) {
  std::filesystem::path p(std::string(detail::trim(value)));
  if (p.is_relative() && !base.empty()) p = base / p;
  return p;
}

Activation as_activation(std::string_view key, std::string_view value) {
  const auto v = detail::trim(value);
  if (v == "tanh") return Activation::Tanh;
  if (v == "identity" || v == "linear") return Activation::Identity;
  bad_value(key, value, "tanh|identity");
}

const std::map<std::string, Setter, std::less<>>& setters() {
  using C = ExperimentConfig;
  using P = const std::filesystem::path&;
  static const std::map<std::string, Setter, std::less<>> table = {
      {"seed", [](C& c, std::string_view v, P) { c.seed = as_u64("seed", v); }},
      {"m", [](C& c, std::string_view v, P) { c.m = as_count("m", v); }},
      {"horizon", [](C& c, std::string_view v, P) { c.horizon = as_count("horizon", v); }},
      {"methods", [](C& c, std::string_view v, P) { c.methods = parse_method_list(v); }},
      {"threads", [](C& c, std::string_view v, P) { c.threads = as_count("threads", v); }},
      {"output_dir", [](C& c, std::string_view v, P b) { c.output_dir = as_path(v, b); }},
      {"manifest", [](C& c, std::string_view v, P b) { c.sources.manifest = as_path(v, b); }},
      {"synth_specs",
       [](C& c, std::string_view v, P b) {
         auto specs = load_synth_specs(as_path(v, b));
         c.sources.synth.insert(c.sources.synth.end(), specs.begin(), specs.end());
       }},
      {"fetch.base_url",
       [](C& c, std::string_view v, P) { c.sources.fetch.base_url = std::string(detail::trim(v)); }},
      {"fetch.suffix",
       [](C& c, std::string_view v, P) { c.sources.fetch.suffix = std::string(detail::trim(v)); }},
      {"fetch.cache_dir", [](C& c, std::string_view v, P b) { c.sources.fetch.cache_dir = as_path(v, b); }},
      {"fetch.offline", [](C& c, std::string_view v, P) { c.sources.fetch.offline = as_bool("fetch.offline", v); }},
      {"fetch.timeout_seconds",
       [](C& c, std::string_view v, P) {
         c.sources.fetch.timeout_seconds = static_cast<int>(as_count("fetch.timeout_seconds", v));
       }},
      {"columns.station", [](C& c, std::string_view v, P) { c.sources.mapping.station = as_count("columns.station", v); }},
      {"columns.decimal_year",
       [](C& c, std::string_view v, P) { c.sources.mapping.decimal_year = as_count("columns.decimal_year", v); }},
      {"columns.x", [](C& c, std::string_view v, P) { c.sources.mapping.x = as_count("columns.x", v); }},
      {"columns.y", [](C& c, std::string_view v, P) { c.sources.mapping.y = as_count("columns.y", v); }},
      {"columns.z", [](C& c, std::string_view v, P) { c.sources.mapping.z = as_optional_column("columns.z", v); }},
      {"columns.sigma_x",
       [](C& c, std::string_view v, P) { c.sources.mapping.sigma_x = as_optional_column("columns.sigma_x", v); }},
      {"columns.sigma_y",
       [](C& c, std::string_view v, P) { c.sources.mapping.sigma_y = as_optional_column("columns.sigma_y", v); }},
      {"columns.sigma_z",
       [](C& c, std::string_view v, P) { c.sources.mapping.sigma_z = as_optional_column("columns.sigma_z", v); }},
      {"columns.geocentric",
       [](C& c, std::string_view v, P) { c.sources.mapping.geocentric = as_bool("columns.geocentric", v); }},
      {"gp.lengthscale_grid",
       [](C& c, std::string_view v, P) { c.hyperparameters.gp.lengthscale_grid = as_list("gp.lengthscale_grid", v); }},
      {"gp.noise_grid",
       [](C& c, std::string_view v, P) { c.hyperparameters.gp.noise_grid = as_list("gp.noise_grid", v); }},
      {"gp.signal_variance",
       [](C& c, std::string_view v, P) { c.hyperparameters.gp.signal_variance = as_double("gp.signal_variance", v); }},
      {"gp.validation_fraction",
       [](C& c, std::string_view v, P) {
         c.hyperparameters.gp.validation_fraction = as_double("gp.validation_fraction", v);
       }},
      {"knn.k", [](C& c, std::string_view v, P) { c.hyperparameters.knn.k = as_count("knn.k", v); }},
      {"knn.weighting",
       [](C& c, std::string_view v, P) {
         const auto w = detail::trim(v);
         if (w == "uniform") {
           c.hyperparameters.knn.weighting = KnnWeighting::Uniform;
         } else if (w == "inverse-distance" || w == "inverse_distance") {
           c.hyperparameters.knn.weighting = KnnWeighting::InverseDistance;
         } else {
           bad_value("knn.weighting", v, "uniform|inverse-distance");
         }
       }},
      {"grnn.bandwidth_grid",
       [](C& c, std::string_view v, P) { c.hyperparameters.grnn.bandwidth_grid = as_list("grnn.bandwidth_grid", v); }},
      {"cart.max_depth",
       [](C& c, std::string_view v, P) {
         c.hyperparameters.cart.max_depth = detail::trim(v) == "unlimited" ? CartParams::kUnlimitedDepth
                                                                            : as_count("cart.max_depth", v);
       }},
      {"cart.min_samples_leaf",
       [](C& c, std::string_view v, P) { c.hyperparameters.cart.min_samples_leaf = as_count("cart.min_samples_leaf", v); }},
      {"svr.c", [](C& c, std::string_view v, P) { c.hyperparameters.svr.c = as_double("svr.c", v); }},
      {"svr.epsilon", [](C& c, std::string_view v, P) { c.hyperparameters.svr.epsilon = as_double("svr.epsilon", v); }},
      {"svr.kernel",
       [](C& c, std::string_view v, P) {
         const auto k = detail::trim(v);
         if (k == "rbf") {
           c.hyperparameters.svr.kernel = SvrKernel::Rbf;
         } else if (k == "linear") {
           c.hyperparameters.svr.kernel = SvrKernel::Linear;
         } else {
           bad_value("svr.kernel", v, "rbf|linear");
         }
       }},
      {"svr.gamma", [](C& c, std::string_view v, P) { c.hyperparameters.svr.gamma = as_double("svr.gamma", v); }},
      {"svr.max_passes", [](C& c, std::string_view v, P) { c.hyperparameters.svr.max_passes = as_count("svr.max_passes", v); }},
      {"svr.tolerance", [](C& c, std::string_view v, P) { c.hyperparameters.svr.tolerance = as_double("svr.tolerance", v); }},
      {"mlp.width", [](C& c, std::string_view v, P) { c.hyperparameters.mlp.width = as_count("mlp.width", v); }},
      {"mlp.epochs", [](C& c, std::string_view v, P) { c.hyperparameters.mlp.epochs = as_count("mlp.epochs", v); }},
      {"mlp.learning_rate",
       [](C& c, std::string_view v, P) { c.hyperparameters.mlp.learning_rate = as_double("mlp.learning_rate", v); }},
      {"mlp.seed", [](C& c, std::string_view v, P) { c.hyperparameters.mlp.seed = as_u64("mlp.seed", v); }},
      {"mlp.activation",
       [](C& c, std::string_view v, P) { c.hyperparameters.mlp.activation = as_activation("mlp.activation", v); }},
      {"bnn.ensemble_size",
       [](C& c, std::string_view v, P) { c.hyperparameters.bnn.ensemble_size = as_count("bnn.ensemble_size", v); }},
      {"bnn.prior_stddev",
       [](C& c, std::string_view v, P) { c.hyperparameters.bnn.prior_stddev = as_double("bnn.prior_stddev", v); }},
      {"bnn.width", [](C& c, std::string_view v, P) { c.hyperparameters.bnn.member.width = as_count("bnn.width", v); }},
      {"bnn.epochs", [](C& c, std::string_view v, P) { c.hyperparameters.bnn.member.epochs = as_count("bnn.epochs", v); }},
      {"bnn.learning_rate",
       [](C& c, std::string_view v, P) {
         c.hyperparameters.bnn.member.learning_rate = as_double("bnn.learning_rate", v);
       }},
      {"bnn.seed", [](C& c, std::string_view v, P) { c.hyperparameters.bnn.member.seed = as_u64("bnn.seed", v); }},
      {"bnn.activation",
       [](C& c, std::string_view v, P) {
         c.hyperparameters.bnn.member.activation = as_activation("bnn.activation", v);
       }},
  };
  return table;
}

const std::set<std::string, std::less<>>& roster_keys() {
  static const std::set<std::string, std::less<>> keys = {
      "synth.roster_size", "synth.roster_seed", "synth.length",    "synth.start_epoch",
      "synth.cadence_days", "synth.noise_sigma", "synth.trend_min", "synth.trend_max",
      "synth.amplitude_min", "synth.amplitude_max"};
  return keys;
}

void apply_roster_setting(RosterOptions& r, std::string_view key, std::string_view value) {
  if (key == "synth.roster_size") r.stations = as_count(key, value);
  else if (key == "synth.roster_seed") r.seed = as_u64(key, value);
  else if (key == "synth.length") r.length = as_count(key, value);
  else if (key == "synth.start_epoch") r.start_epoch = as_double(key, value);
  else if (key == "synth.cadence_days") r.cadence_days = as_double(key, value);
  else if (key == "synth.noise_sigma") r.noise_sigma = as_double(key, value);
  else if (key == "synth.trend_min") r.trend_min = as_double(key, value);
  else if (key == "synth.trend_max") r.trend_max = as_double(key, value);
  else if (key == "synth.amplitude_min") r.amplitude_min = as_double(key, value);
  else if (key == "synth.amplitude_max") r.amplitude_max = as_double(key, value);
}

}  // namespace

std::vector<ConfigEntry> parse_config_text(std::string_view text) {
  std::vector<ConfigEntry> out;
  std::set<std::string, std::less<>> seen;
  std::size_t line_no = 0;
  for (auto raw : detail::split_lines(text)) {
    ++line_no;
    auto line = raw;
    if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    line = detail::trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) {
      throw Error(ErrorCode::ConfigError, fmt::format("line {}: expected `key = value`", line_no));
    }
    std::string key(detail::trim(line.substr(0, eq)));
    if (key.empty()) throw Error(ErrorCode::ConfigError, fmt::format("line {}: empty key", line_no));
    if (!seen.insert(key).second) {
      throw Error(ErrorCode::ConfigError, fmt::format("line {}: key '{}' repeated", line_no, key));
    }
    out.push_back({std::move(key), std::string(detail::trim(line.substr(eq + 1))), line_no});
  }
  return out;
}

void apply_setting(ExperimentConfig& config, std::string_view key, std::string_view value,
                   const std::filesystem::path& base_dir) {
  const auto& table = setters();
  const auto it = table.find(key);
  if (it == table.end()) throw Error(ErrorCode::ConfigError, fmt::format("unknown key '{}'", key));
  it->second(config, value, base_dir);
}

std::vector<std::string> known_config_keys() {
  std::vector<std::string> keys;
  for (const auto& [k, _] : setters()) keys.push_back(k);
  keys.insert(keys.end(), roster_keys().begin(), roster_keys().end());
  std::sort(keys.begin(), keys.end());
  return keys;
}

ExperimentConfig experiment_config_from_text(std::string_view text,
                                             const std::filesystem::path& base_dir) {
  ExperimentConfig config;
  RosterOptions roster;
  roster.stations = 0;
  for (const auto& entry : parse_config_text(text)) {
    try {
      if (roster_keys().contains(entry.key)) {
        apply_roster_setting(roster, entry.key, entry.value);
      } else {
        apply_setting(config, entry.key, entry.value, base_dir);
      }
    } catch (const Error& e) {
      throw Error(e.code() == ErrorCode::InvalidSpec ? ErrorCode::InvalidSpec : ErrorCode::ConfigError,
                  fmt::format("line {}: {}", entry.line, e.what()));
    }
  }
  if (roster.stations > 0) {
    auto specs = synthetic_roster(roster);
    config.sources.synth.insert(config.sources.synth.end(), specs.begin(), specs.end());
  }
  return config;
}

ExperimentConfig load_experiment_config(const std::filesystem::path& path) {
  const auto text = read_text_file(path);
  return experiment_config_from_text(text, path.parent_path());
}

namespace {

nlohmann::ordered_json synth_to_json(const SynthSpec& s) {
  nlohmann::ordered_json j;
  j["station_id"] = s.station_id;
  j["start_epoch"] = s.start_epoch;
  j["cadence_days"] = s.cadence_days;
  j["length"] = s.length;
  j["noise_sigma"] = s.noise_sigma;
  j["seed"] = s.seed;
  static constexpr const char* names[] = {"x", "y", "z"};
  for (std::size_t c = 0; c < 3; ++c) {
    const auto& p = s.components[c];
    j[names[c]] = {{"intercept", p.intercept},
                   {"trend", p.trend},
                   {"annual_amplitude", p.annual_amplitude},
                   {"annual_phase", p.annual_phase}};
  }
  return j;
}

nlohmann::ordered_json opt_col(const std::optional<std::size_t>& c) {
  return c ? nlohmann::ordered_json(*c) : nlohmann::ordered_json(nullptr);
}

}  // namespace

std::string config_to_json(const ExperimentConfig& c) {
  nlohmann::ordered_json j;
  j["seed"] = c.seed;
  j["m"] = c.m;
  j["horizon"] = c.horizon;
  auto& methods = j["methods"] = nlohmann::ordered_json::array();
  for (auto k : c.methods) methods.push_back(std::string(to_string(k)));
  const auto& s = c.sources;
  j["sources"]["manifest"] = s.manifest ? s.manifest->generic_string() : std::string();
  j["sources"]["fetch"] = {{"base_url", s.fetch.base_url},
                           {"suffix", s.fetch.suffix},
                           {"offline", s.fetch.offline}};
  j["sources"]["columns"] = {{"station", s.mapping.station},
                             {"decimal_year", s.mapping.decimal_year},
                             {"x", s.mapping.x},
                             {"y", s.mapping.y},
                             {"z", opt_col(s.mapping.z)},
                             {"sigma_x", opt_col(s.mapping.sigma_x)},
                             {"sigma_y", opt_col(s.mapping.sigma_y)},
                             {"sigma_z", opt_col(s.mapping.sigma_z)},
                             {"geocentric", s.mapping.geocentric}};
  auto& synth = j["sources"]["synth"] = nlohmann::ordered_json::array();
  for (const auto& spec : s.synth) synth.push_back(synth_to_json(spec));
  auto& direct = j["sources"]["series"] = nlohmann::ordered_json::array();
  for (const auto& series : s.series) direct.push_back(series.station_id);

  const auto& h = c.hyperparameters;
  auto& hp = j["hyperparameters"];
  hp["gp"] = {{"lengthscale_grid", h.gp.lengthscale_grid},
              {"noise_grid", h.gp.noise_grid},
              {"signal_variance", h.gp.signal_variance},
              {"validation_fraction", h.gp.validation_fraction}};
  hp["knn"] = {{"k", h.knn.k},
               {"weighting", h.knn.weighting == KnnWeighting::Uniform ? "uniform" : "inverse-distance"}};
  hp["grnn"] = {{"bandwidth_grid", h.grnn.bandwidth_grid}};
  hp["cart"] = {{"max_depth", h.cart.max_depth == CartParams::kUnlimitedDepth
                                  ? nlohmann::ordered_json("unlimited")
                                  : nlohmann::ordered_json(h.cart.max_depth)},
                {"min_samples_leaf", h.cart.min_samples_leaf}};
  hp["svr"] = {{"c", h.svr.c},
               {"epsilon", h.svr.epsilon},
               {"kernel", h.svr.kernel == SvrKernel::Rbf ? "rbf" : "linear"},
               {"gamma", h.svr.gamma},
               {"max_passes", h.svr.max_passes},
               {"tolerance", h.svr.tolerance}};
  auto mlp_json = [](const MlpParams& p) {
    return nlohmann::ordered_json{{"width", p.width},
                                  {"epochs", p.epochs},
                                  {"learning_rate", p.learning_rate},
                                  {"seed", p.seed},
                                  {"activation", p.activation == Activation::Tanh ? "tanh" : "identity"}};
  };
  hp["mlp"] = mlp_json(h.mlp);
  hp["bnn"] = mlp_json(h.bnn.member);
  hp["bnn"]["ensemble_size"] = h.bnn.ensemble_size;
  hp["bnn"]["prior_stddev"] = std::isinf(h.bnn.prior_stddev) ? nlohmann::ordered_json("inf")
                                                             : nlohmann::ordered_json(h.bnn.prior_stddev);
  return j.dump(2);
}

std::vector<SynthSpec> parse_synth_specs(std::string_view text) {
  std::vector<SynthSpec> specs;
  std::set<std::string, std::less<>> ids;
  std::size_t line_no = 0;
  auto fail = [&](const std::string& why) {
    throw Error(ErrorCode::InvalidSpec, fmt::format("spec line {}: {}", line_no, why));
  };
  for (auto raw : detail::split_lines(text)) {
    ++line_no;
    auto line = raw;
    if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    line = detail::trim(line);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']') fail("unterminated section header");
      std::string id(detail::trim(line.substr(1, line.size() - 2)));
      if (!is_valid_station_id(id)) fail(fmt::format("invalid station id '{}'", id));
      if (!ids.insert(id).second) fail(fmt::format("station {} defined twice", id));
      specs.emplace_back();
      specs.back().station_id = id;
      continue;
    }
    if (specs.empty()) fail("setting before the first [STATION] section");
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) fail("expected `key = value`");
    const std::string key(detail::trim(line.substr(0, eq)));
    const auto value = detail::trim(line.substr(eq + 1));
    auto number = [&]() {
      const auto v = detail::parse_double(value);
      if (!v) fail(fmt::format("{}: '{}' is not a number", key, value));
      return *v;
    };
    auto integer = [&]() {
      const auto v = detail::parse_uint(value);
      if (!v) fail(fmt::format("{}: '{}' is not a non-negative integer", key, value));
      return *v;
    };
    auto& s = specs.back();
    if (key == "start_epoch") s.start_epoch = number();
    else if (key == "cadence_days") s.cadence_days = number();
    else if (key == "length") s.length = static_cast<std::size_t>(integer());
    else if (key == "noise_sigma") s.noise_sigma = number();
    else if (key == "seed") s.seed = integer();
    else {
      const auto dot = key.find('.');
      const std::string axis = key.substr(0, dot);
      const std::string field = dot == std::string::npos ? std::string() : key.substr(dot + 1);
      std::size_t c = 3;
      if (axis == "x") c = 0;
      else if (axis == "y") c = 1;
      else if (axis == "z") c = 2;
      if (c == 3) fail(fmt::format("unknown key '{}'", key));
      auto& p = s.components[c];
      if (field == "intercept") p.intercept = number();
      else if (field == "trend") p.trend = number();
      else if (field == "annual_amplitude") p.annual_amplitude = number();
      else if (field == "annual_phase") p.annual_phase = number();
      else fail(fmt::format("unknown key '{}'", key));
    }
  }
  for (const auto& s : specs) s.validate();
  return specs;
}

std::vector<SynthSpec> load_synth_specs(const std::filesystem::path& path) {
  return parse_synth_specs(read_text_file(path));
}

std::string format_synth_specs(const std::vector<SynthSpec>& specs) {
  std::string out;
  static constexpr const char* names[] = {"x", "y", "z"};
  for (const auto& s : specs) {
    out += fmt::format("[{}]\nstart_epoch = {}\ncadence_days = {}\nlength = {}\nnoise_sigma = {}\nseed = {}\n",
                       s.station_id, s.start_epoch, s.cadence_days, s.length, s.noise_sigma, s.seed);
    for (std::size_t c = 0; c < 3; ++c) {
      const auto& p = s.components[c];
      out += fmt::format("{0}.intercept = {1}\n{0}.trend = {2}\n{0}.annual_amplitude = {3}\n{0}.annual_phase = {4}\n",
                         names[c], p.intercept, p.trend, p.annual_amplitude, p.annual_phase);
    }
    out += '\n';
  }
  return out;
}

}  // namespace gnsspred
