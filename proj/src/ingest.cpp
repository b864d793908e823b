#include "gnsspred/ingest.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <fstream>
#include <numeric>
#include <sstream>
#include <unordered_set>

#include <fmt/format.h>

#include "gnsspred/error.hpp"
#include "text.hpp"

namespace gnsspred {

namespace {

struct Row {
  double epoch = 0.0;
  double x = 0.0;
  double y = 0.0;
  std::optional<double> z;
  std::optional<std::array<double, 3>> sigma;
};

enum class RowStatus { Accepted, Header, Malformed, NonFinite, OutOfRange };

std::optional<double> column(const std::vector<std::string_view>& tokens, std::size_t index) {
  if (index >= tokens.size()) return std::nullopt;
  return detail::parse_double(tokens[index]);
}

}  // namespace

ColumnMapping ColumnMapping::compact() {
  ColumnMapping m;
  m.station = 0;
  m.decimal_year = 1;
  m.x = 2;
  m.y = 3;
  m.z = 4;
  m.sigma_x.reset();
  m.sigma_y.reset();
  m.sigma_z.reset();
  return m;
}

void StationSeries::validate() const {
  const std::size_t n = epochs.size();
  auto fail = [&](const std::string& why) {
    throw Error(ErrorCode::InvalidSpec, fmt::format("station {}: {}", station_id, why));
  };
  if (n < 2) fail("fewer than 2 samples");
  if (first.size() != n || second.size() != n) fail("component lengths differ from epochs");
  if (!third.empty() && third.size() != n) fail("Z length differs from epochs");
  for (const auto* s : {&sigma_first, &sigma_second, &sigma_third}) {
    if (!s->empty() && s->size() != n) fail("sigma length differs from epochs");
  }
  for (std::size_t i = 0; i < n; ++i) {
    if (!std::isfinite(epochs[i]) || !std::isfinite(first[i]) || !std::isfinite(second[i])) {
      fail(fmt::format("non-finite value at sample {}", i));
    }
    if (i > 0 && !(epochs[i] > epochs[i - 1])) {
      fail(fmt::format("epochs not strictly increasing at sample {}", i));
    }
  }
}

ParsedStation parse_cartesian_file(std::string_view content, const ColumnMapping& mapping) {
  ParseDiagnostics diag;
  std::vector<Row> rows;
  std::string station;

  const bool want_sigma = mapping.sigma_x && mapping.sigma_y && mapping.sigma_z;

  for (const auto raw_line : detail::split_lines(content)) {
    const auto line = detail::trim(raw_line);
    if (line.empty() || line.front() == '#') continue;
    ++diag.rows_read;

    const auto tokens = detail::split_ws(line);
    auto classify = [&]() -> RowStatus {
      if (tokens.size() <= mapping.decimal_year) return RowStatus::Malformed;
      const auto epoch = detail::parse_double(tokens[mapping.decimal_year]);
      if (!epoch) return RowStatus::Header;
      if (mapping.station >= tokens.size()) return RowStatus::Malformed;
      const auto x = column(tokens, mapping.x);
      const auto y = column(tokens, mapping.y);
      if (!x || !y) return RowStatus::Malformed;

      Row row;
      row.epoch = *epoch;
      row.x = *x;
      row.y = *y;
      bool finite = std::isfinite(*epoch) && std::isfinite(*x) && std::isfinite(*y);
      if (mapping.z && *mapping.z < tokens.size()) {
        row.z = column(tokens, *mapping.z);
        if (!row.z) return RowStatus::Malformed;
        finite = finite && std::isfinite(*row.z);
      }
      if (want_sigma && *mapping.sigma_x < tokens.size() && *mapping.sigma_y < tokens.size() &&
          *mapping.sigma_z < tokens.size()) {
        const auto sx = column(tokens, *mapping.sigma_x);
        const auto sy = column(tokens, *mapping.sigma_y);
        const auto sz = column(tokens, *mapping.sigma_z);
        if (!sx || !sy || !sz) return RowStatus::Malformed;
        finite = finite && std::isfinite(*sx) && std::isfinite(*sy) && std::isfinite(*sz);
        row.sigma = std::array<double, 3>{*sx, *sy, *sz};
      }
      if (!finite) return RowStatus::NonFinite;
      if (row.epoch < kMinEpoch || row.epoch > kMaxEpoch) return RowStatus::OutOfRange;
      if (mapping.geocentric && row.z) {
        const double r = std::sqrt(row.x * row.x + row.y * row.y + *row.z * *row.z);
        if (r < kMinEcefRadius || r > kMaxEcefRadius) return RowStatus::OutOfRange;
      }

      std::string id(tokens[mapping.station]);
      std::transform(id.begin(), id.end(), id.begin(),
                     [](unsigned char c) { return static_cast<char>(std::toupper(c)); });
      if (!is_valid_station_id(id)) return RowStatus::Malformed;
      if (station.empty()) {
        station = id;
      } else if (id != station) {
        throw Error(ErrorCode::InconsistentStation,
                    fmt::format("file mixes stations {} and {}", station, id));
      }
      rows.push_back(row);
      return RowStatus::Accepted;
    };

    switch (classify()) {
      case RowStatus::Accepted: ++diag.accepted; continue;
      case RowStatus::Header: ++diag.header_rows; break;
      case RowStatus::Malformed: ++diag.malformed_rows; break;
      case RowStatus::NonFinite: ++diag.non_finite_rows; break;
      case RowStatus::OutOfRange: ++diag.out_of_range_rows; break;
    }
    ++diag.skipped;
  }

  // Stable sort keeps file order within equal epochs, so the last row of each
  // run of equal epochs is the latest occurrence in the file.
  std::stable_sort(rows.begin(), rows.end(),
                   [](const Row& a, const Row& b) { return a.epoch < b.epoch; });
  std::vector<Row> unique;
  unique.reserve(rows.size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (i + 1 < rows.size() && rows[i + 1].epoch == rows[i].epoch) {
      ++diag.duplicate_epochs;
      continue;
    }
    unique.push_back(rows[i]);
  }

  if (unique.size() < 2) {
    throw Error(ErrorCode::EmptyFile,
                fmt::format("{} valid row(s) found, at least 2 required", unique.size()));
  }
  for (std::size_t i = 1; i < unique.size(); ++i) {
    if (!(unique[i].epoch > unique[i - 1].epoch)) {
      throw Error(ErrorCode::NonMonotoneAfterSort,
                  fmt::format("epochs not strictly increasing at row {}", i));
    }
  }

  const bool all_z = std::all_of(unique.begin(), unique.end(), [](const Row& r) { return r.z.has_value(); });
  const bool all_sigma =
      std::all_of(unique.begin(), unique.end(), [](const Row& r) { return r.sigma.has_value(); });

  ParsedStation out;
  out.diagnostics = diag;
  StationSeries& s = out.series;
  s.station_id = station;
  const std::size_t n = unique.size();
  s.epochs.reserve(n);
  s.first.reserve(n);
  s.second.reserve(n);
  for (const auto& r : unique) {
    s.epochs.push_back(r.epoch);
    s.first.push_back(r.x);
    s.second.push_back(r.y);
    if (all_z) s.third.push_back(*r.z);
    if (all_sigma) {
      s.sigma_first.push_back((*r.sigma)[0]);
      s.sigma_second.push_back((*r.sigma)[1]);
      s.sigma_third.push_back((*r.sigma)[2]);
    }
  }
  return out;
}

std::string read_text_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::IoError, fmt::format("cannot open {}", path.string()));
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

ParsedStation read_station_file(const std::filesystem::path& path, const ColumnMapping& mapping) {
  return parse_cartesian_file(read_text_file(path), mapping);
}

std::string decimal_year_label(double decimal_year) {
  static constexpr std::array<const char*, 12> kMonths = {
      "JAN", "FEB", "MAR", "APR", "MAY", "JUN", "JUL", "AUG", "SEP", "OCT", "NOV", "DEC"};
  const int year = static_cast<int>(std::floor(decimal_year));
  const bool leap = (year % 4 == 0 && year % 100 != 0) || year % 400 == 0;
  const int days_in_year = leap ? 366 : 365;
  int doy = static_cast<int>(std::floor((decimal_year - year) * days_in_year + 1e-9));
  doy = std::clamp(doy, 0, days_in_year - 1);
  std::array<int, 12> month_days = {31, leap ? 29 : 28, 31, 30, 31, 30, 31, 31, 30, 31, 30, 31};
  int month = 0;
  while (doy >= month_days[month]) {
    doy -= month_days[month];
    ++month;
  }
  return fmt::format("{:02d}{}{:02d}", ((year % 100) + 100) % 100, kMonths[month], doy + 1);
}

std::string format_station_file(const StationSeries& series) {
  series.validate();
  const bool with_z = series.has_third();
  const bool with_sigma = with_z && series.has_sigmas() && !series.sigma_third.empty();
  std::string out;
  out += "# site YYMMMDD decimal_year x_m y_m";
  if (with_z) out += " z_m";
  if (with_sigma) out += " sigma_x_m sigma_y_m sigma_z_m";
  out += '\n';
  for (std::size_t i = 0; i < series.length(); ++i) {
    out += fmt::format("{} {} {:.8f} {:.6f} {:.6f}", series.station_id,
                       decimal_year_label(series.epochs[i]), series.epochs[i], series.first[i],
                       series.second[i]);
    if (with_z) out += fmt::format(" {:.6f}", series.third[i]);
    if (with_sigma) {
      out += fmt::format(" {:.6f} {:.6f} {:.6f}", series.sigma_first[i], series.sigma_second[i],
                         series.sigma_third[i]);
    }
    out += '\n';
  }
  return out;
}

void write_station_file(const std::filesystem::path& path, const StationSeries& series) {
  atomic_write(path, format_station_file(series));
}

bool is_valid_station_id(std::string_view id) noexcept {
  if (id.size() != 4) return false;
  return std::all_of(id.begin(), id.end(), [](char c) {
    return (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9');
  });
}

std::vector<StationDescriptor> parse_manifest(std::string_view content) {
  std::vector<StationDescriptor> out;
  std::unordered_set<std::string> seen;
  std::size_t line_no = 0;
  for (const auto raw_line : detail::split_lines(content)) {
    ++line_no;
    const auto line = detail::trim(raw_line);
    if (line.empty() || line.front() == '#') continue;
    const auto tokens = detail::split_ws(line);
    if (tokens.size() > 2) {
      throw Error(ErrorCode::ParseError,
                  fmt::format("manifest line {}: expected `STATION_ID [path]`", line_no));
    }
    std::string id(tokens[0]);
    std::transform(id.begin(), id.end(), id.begin(),
                   [](unsigned char c) { return static_cast<char>(std::toupper(c)); });
    if (!is_valid_station_id(id)) {
      throw Error(ErrorCode::ParseError,
                  fmt::format("manifest line {}: invalid station id '{}'", line_no, id));
    }
    if (!seen.insert(id).second) {
      throw Error(ErrorCode::DuplicateStation,
                  fmt::format("manifest line {}: station {} listed twice", line_no, id));
    }
    StationDescriptor d{id, std::nullopt};
    if (tokens.size() == 2) d.local_path = std::filesystem::path(std::string(tokens[1]));
    out.push_back(std::move(d));
  }
  if (out.empty()) throw Error(ErrorCode::Empty, "manifest lists no stations");
  return out;
}

std::vector<StationDescriptor> load_manifest(const std::filesystem::path& path) {
  return parse_manifest(read_text_file(path));
}

}  // namespace gnsspred
