#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "gnsspred/ingest.hpp"

namespace gnsspred {

/// Deterministic part of one coordinate: intercept + trend*(t - t0) +
/// amplitude*sin(2*pi*(t - t0) + phase).
struct SignalParams {
  double intercept = 0.0;         // meters
  double trend = 0.0;             // meters / year
  double annual_amplitude = 0.0;  // meters
  double annual_phase = 0.0;      // radians

  double operator()(double years_since_start) const noexcept;
};

struct SynthSpec {
  std::string station_id;
  double start_epoch = 2015.0;  // decimal years
  double cadence_days = 1.0;
  std::size_t length = 2;
  /// X, Y, Z. White noise of `noise_sigma` is added to each.
  std::array<SignalParams, 3> components{};
  double noise_sigma = 0.0;  // meters
  std::uint64_t seed = 0;

  /// Throws InvalidSpec.
  void validate() const;
};

inline constexpr double kDaysPerYear = 365.25;

/// Epochs t_k = start + k * cadence / 365.25. Each coordinate draws its noise
/// from its own substream keyed by (seed, station_id, coordinate).
StationSeries generate(const SynthSpec& spec);

/// Geodetic latitude/longitude (degrees) and ellipsoidal height on GRS80 to
/// Earth-centred Cartesian coordinates (meters).
std::array<double, 3> geodetic_to_ecef(double lat_deg, double lon_deg, double height_m) noexcept;

struct RosterOptions {
  std::size_t stations = 14;
  std::size_t length = 1500;
  double start_epoch = 2012.0;
  double cadence_days = 1.0;
  double trend_min = 0.003, trend_max = 0.010;         // m/yr, magnitude
  double amplitude_min = 0.002, amplitude_max = 0.005; // m
  double noise_sigma = 0.005;                          // m
  std::uint64_t seed = 2020;
};

/// Stations spread over Europe with X/Y trends and annual amplitudes drawn
/// uniformly from the configured ranges (random sign on the trend).
std::vector<SynthSpec> synthetic_roster(const RosterOptions& options);

}  // namespace gnsspred
