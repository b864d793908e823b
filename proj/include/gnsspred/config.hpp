#pragma once

#include <cstddef>
#include <filesystem>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "gnsspred/harness.hpp"
#include "gnsspred/synth.hpp"

namespace gnsspred {

/// `key = value` lines; `#` starts a comment. Keys are dotted
/// (e.g. `gp.lengthscale_grid = 0.03, 0.1`). Lists are comma-separated.
struct ConfigEntry {
  std::string key;
  std::string value;
  std::size_t line = 0;
};

/// Throws ConfigError on malformed lines or repeated keys.
std::vector<ConfigEntry> parse_config_text(std::string_view text);

/// Applies one setting. Relative paths resolve against `base_dir`.
/// Throws ConfigError for unknown keys or bad values.
void apply_setting(ExperimentConfig& config, std::string_view key, std::string_view value,
                   const std::filesystem::path& base_dir = {});

/// Defaults overlaid with the file's settings; `synth.roster_size` expands
/// into synthetic station specs and `synth_specs` loads a spec file.
ExperimentConfig load_experiment_config(const std::filesystem::path& path);
ExperimentConfig experiment_config_from_text(std::string_view text,
                                             const std::filesystem::path& base_dir = {});

/// Every setting that influences results, as JSON.
std::string config_to_json(const ExperimentConfig& config);

/// The keys accepted by apply_setting, for help output.
std::vector<std::string> known_config_keys();

/// Synthetic station spec file: one `[STATION_ID]` section per station with
/// keys start_epoch, cadence_days, length, noise_sigma, seed and
/// {x,y,z}.{intercept,trend,annual_amplitude,annual_phase}.
/// Throws InvalidSpec.
std::vector<SynthSpec> parse_synth_specs(std::string_view text);
std::vector<SynthSpec> load_synth_specs(const std::filesystem::path& path);
std::string format_synth_specs(const std::vector<SynthSpec>& specs);

}  // namespace gnsspred
