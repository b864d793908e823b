#include "gnsspred/synth.hpp"

#include <cmath>
#include <numbers>

#include <fmt/format.h>

#include "gnsspred/error.hpp"
#include "gnsspred/numerics.hpp"

namespace gnsspred {

double SignalParams::operator()(double dt) const noexcept {
  return intercept + trend * dt +
         annual_amplitude * std::sin(2.0 * std::numbers::pi * dt + annual_phase);
}

void SynthSpec::validate() const {
  auto fail = [&](const std::string& why) {
    throw Error(ErrorCode::InvalidSpec, fmt::format("synth spec {}: {}", station_id, why));
  };
  if (!is_valid_station_id(station_id)) fail("station id must be 4 characters [A-Z0-9]");
  if (!(cadence_days > 0.0) || !std::isfinite(cadence_days)) fail("cadence must be positive");
  if (length < 2) fail("length must be at least 2");
  if (!(noise_sigma >= 0.0) || !std::isfinite(noise_sigma)) fail("noise sigma must be >= 0");
  if (!std::isfinite(start_epoch)) fail("start epoch must be finite");
  const double end = start_epoch + static_cast<double>(length - 1) * cadence_days / kDaysPerYear;
  if (start_epoch < kMinEpoch || end > kMaxEpoch) {
    fail(fmt::format("epochs [{}, {}] outside [{}, {}]", start_epoch, end, kMinEpoch, kMaxEpoch));
  }
  for (const auto& c : components) {
    if (!std::isfinite(c.intercept) || !std::isfinite(c.trend) ||
        !std::isfinite(c.annual_amplitude) || !std::isfinite(c.annual_phase)) {
      fail("signal parameters must be finite");
    }
  }
}

StationSeries generate(const SynthSpec& spec) {
  spec.validate();
  const RngStream station_stream = RngStream(spec.seed, hash_string(spec.station_id));
  StationSeries s;
  s.station_id = spec.station_id;
  s.epochs.resize(spec.length);
  for (std::size_t k = 0; k < spec.length; ++k) {
    s.epochs[k] = spec.start_epoch + static_cast<double>(k) * spec.cadence_days / kDaysPerYear;
  }
  std::array<std::vector<double>*, 3> outputs = {&s.first, &s.second, &s.third};
  for (std::size_t c = 0; c < 3; ++c) {
    RngStream noise = station_stream.fork(static_cast<std::uint64_t>(c));
    auto& out = *outputs[c];
    out.resize(spec.length);
    for (std::size_t k = 0; k < spec.length; ++k) {
      const double dt = s.epochs[k] - spec.start_epoch;
      out[k] = spec.components[c](dt);
      if (spec.noise_sigma > 0.0) out[k] += spec.noise_sigma * noise.normal();
    }
  }
  return s;
}

std::array<double, 3> geodetic_to_ecef(double lat_deg, double lon_deg, double height_m) noexcept {
  constexpr double a = 6378137.0;
  constexpr double f = 1.0 / 298.257222101;
  constexpr double e2 = f * (2.0 - f);
  const double lat = lat_deg * std::numbers::pi / 180.0;
  const double lon = lon_deg * std::numbers::pi / 180.0;
  const double n = a / std::sqrt(1.0 - e2 * std::sin(lat) * std::sin(lat));
  return {(n + height_m) * std::cos(lat) * std::cos(lon),
          (n + height_m) * std::cos(lat) * std::sin(lon),
          (n * (1.0 - e2) + height_m) * std::sin(lat)};
}

std::vector<SynthSpec> synthetic_roster(const RosterOptions& options) {
  RngStream rng(options.seed, hash_string("roster"));
  std::vector<SynthSpec> out;
  out.reserve(options.stations);
  auto between = [&](double lo, double hi) { return lo + (hi - lo) * rng.uniform(); };
  for (std::size_t i = 0; i < options.stations; ++i) {
    SynthSpec spec;
    spec.station_id = fmt::format("S{:03d}", i % 1000);
    spec.start_epoch = options.start_epoch;
    spec.cadence_days = options.cadence_days;
    spec.length = options.length;
    spec.noise_sigma = options.noise_sigma;
    spec.seed = options.seed;
    const double lat = between(38.0, 60.0);
    const double lon = between(-8.0, 25.0);
    const double height = between(50.0, 900.0);
    const auto xyz = geodetic_to_ecef(lat, lon, height);
    for (std::size_t c = 0; c < 3; ++c) {
      auto& p = spec.components[c];
      p.intercept = xyz[c];
      if (c < 2) {
        const double sign = rng.uniform() < 0.5 ? -1.0 : 1.0;
        p.trend = sign * between(options.trend_min, options.trend_max);
        p.annual_amplitude = between(options.amplitude_min, options.amplitude_max);
        p.annual_phase = between(0.0, 2.0 * std::numbers::pi);
      }
    }
    out.push_back(std::move(spec));
  }
  return out;
}

}  // namespace gnsspred
