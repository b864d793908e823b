#pragma once

#include <cstddef>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace gnsspred {

/// One station's position time series in an Earth-centred Cartesian frame.
///
/// `first` and `second` are the X and Y coordinates (the two lateral
/// components that get forecast). `third` (Z) and the sigma vectors are
/// carried when the source provides them and are empty otherwise.
struct StationSeries {
  std::string station_id;
  std::vector<double> epochs;  // decimal years, strictly increasing
  std::vector<double> first;   // X, meters
  std::vector<double> second;  // Y, meters
  std::vector<double> third;   // Z, meters (optional)
  std::vector<double> sigma_first;
  std::vector<double> sigma_second;
  std::vector<double> sigma_third;

  std::size_t length() const noexcept { return epochs.size(); }
  bool has_third() const noexcept { return !third.empty(); }
  bool has_sigmas() const noexcept { return !sigma_first.empty(); }

  /// Throws Error(InvalidSpec) when lengths disagree, epochs are not strictly
  /// increasing, any value is non-finite, or fewer than two samples exist.
  void validate() const;

  friend bool operator==(const StationSeries&, const StationSeries&) = default;
};

/// Zero-based column indices of a whitespace-delimited station file.
struct ColumnMapping {
  std::size_t station = 0;
  std::size_t decimal_year = 2;
  std::size_t x = 3;
  std::size_t y = 4;
  std::optional<std::size_t> z = 5;
  std::optional<std::size_t> sigma_x = 6;
  std::optional<std::size_t> sigma_y = 7;
  std::optional<std::size_t> sigma_z = 8;
  /// Reject rows whose |(x, y, z)| falls outside the plausible ECEF shell.
  /// Only applied when z is mapped.
  bool geocentric = true;

  /// Layout `STA YYMMMDD decyear X Y Z sx sy sz ...` (the default).
  static ColumnMapping ngl() { return {}; }
  /// Layout `STA decyear X Y Z` with no date column and no sigmas.
  static ColumnMapping compact();
};

struct ParseDiagnostics {
  std::size_t rows_read = 0;        // non-blank, non-comment rows
  std::size_t accepted = 0;
  std::size_t skipped = 0;          // header + malformed + non-finite + out-of-range
  std::size_t header_rows = 0;      // decimal-year column not numeric
  std::size_t malformed_rows = 0;   // missing columns or unparsable numbers
  std::size_t non_finite_rows = 0;
  std::size_t out_of_range_rows = 0;
  std::size_t duplicate_epochs = 0; // earlier rows superseded by a later one
};

struct ParsedStation {
  StationSeries series;
  ParseDiagnostics diagnostics;
};

inline constexpr double kMinEpoch = 1990.0;
inline constexpr double kMaxEpoch = 2100.0;
inline constexpr double kMinEcefRadius = 1.0e6;
inline constexpr double kMaxEcefRadius = 1.0e7;

/// Parses a one-station whitespace-delimited file. Rows are sorted by epoch;
/// when an epoch repeats, the row appearing last in the file wins.
ParsedStation parse_cartesian_file(std::string_view content,
                                   const ColumnMapping& mapping = ColumnMapping{});

ParsedStation read_station_file(const std::filesystem::path& path,
                                const ColumnMapping& mapping = ColumnMapping{});

/// Writes the default (ngl) layout. Sigma and Z columns are written as
/// given, or as zeros/omitted when absent. Meters get 6 decimals, years 8.
std::string format_station_file(const StationSeries& series);

void write_station_file(const std::filesystem::path& path, const StationSeries& series);

/// `YYMMMDD` calendar label for a decimal year, e.g. 2015.0 -> "15JAN01".
std::string decimal_year_label(double decimal_year);

bool is_valid_station_id(std::string_view id) noexcept;

struct StationDescriptor {
  std::string station_id;
  std::optional<std::filesystem::path> local_path;

  friend bool operator==(const StationDescriptor&, const StationDescriptor&) = default;
};

/// Manifest lines are `STATION_ID [path]`; blank lines and `#` comments are
/// ignored. Relative paths are kept as written.
std::vector<StationDescriptor> parse_manifest(std::string_view content);
std::vector<StationDescriptor> load_manifest(const std::filesystem::path& path);

struct FetchOptions {
  std::string base_url = "http://geodesy.unr.edu/gps_timeseries/txyz/IGS14";
  std::string suffix = ".txyz2";
  std::filesystem::path cache_dir = "gnss_cache";
  bool offline = false;
  int timeout_seconds = 30;
};

std::filesystem::path cache_path(const FetchOptions& options, std::string_view station_id);

/// Returns the station file, from the cache when present. Downloads land in
/// the cache through a temporary file and a rename.
std::string fetch_station(std::string_view station_id, const FetchOptions& options);

/// Replaces `path` with `content` via write-temp-then-rename.
void atomic_write(const std::filesystem::path& path, std::string_view content);

std::string read_text_file(const std::filesystem::path& path);

}  // namespace gnsspred
