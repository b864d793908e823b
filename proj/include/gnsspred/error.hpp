#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace gnsspred {

enum class ErrorCode {
  // ingest
  EmptyFile,
  InconsistentStation,
  NonMonotoneAfterSort,
  NetworkError,
  CacheMissOffline,
  StationNotFound,
  ParseError,
  DuplicateStation,
  // series
  DegenerateRange,
  InsufficientData,
  BadComponent,
  // numerics
  NotPositiveDefinite,
  DimensionMismatch,
  // models
  BadHyperparameters,
  NumericalFailure,
  // metrics
  LengthMismatch,
  Empty,
  MixedKeys,
  // harness / cli
  StationTooShort,
  IoError,
  InvalidSpec,
  ConfigError,
};

std::string_view to_string(ErrorCode code) noexcept;

/// Base exception for every failure raised by the library. The code is the
/// stable, testable part; the message is for humans.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

class NetworkError : public Error {
 public:
  NetworkError(const std::string& message, std::optional<int> http_status)
      : Error(ErrorCode::NetworkError, message), http_status_(http_status) {}

  std::optional<int> http_status() const noexcept { return http_status_; }

 private:
  std::optional<int> http_status_;
};

class StationTooShortError : public Error {
 public:
  StationTooShortError(const std::string& message, std::vector<std::string> stations)
      : Error(ErrorCode::StationTooShort, message), stations_(std::move(stations)) {}

  const std::vector<std::string>& stations() const noexcept { return stations_; }

 private:
  std::vector<std::string> stations_;
};

}  // namespace gnsspred
