#include "gnsspred/error.hpp"

namespace gnsspred {

std::string_view to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::EmptyFile: return "EmptyFile";
    case ErrorCode::InconsistentStation: return "InconsistentStation";
    case ErrorCode::NonMonotoneAfterSort: return "NonMonotoneAfterSort";
    case ErrorCode::NetworkError: return "NetworkError";
    case ErrorCode::CacheMissOffline: return "CacheMissOffline";
    case ErrorCode::StationNotFound: return "StationNotFound";
    case ErrorCode::ParseError: return "ParseError";
    case ErrorCode::DuplicateStation: return "DuplicateStation";
    case ErrorCode::DegenerateRange: return "DegenerateRange";
    case ErrorCode::InsufficientData: return "InsufficientData";
    case ErrorCode::BadComponent: return "BadComponent";
    case ErrorCode::NotPositiveDefinite: return "NotPositiveDefinite";
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::BadHyperparameters: return "BadHyperparameters";
    case ErrorCode::NumericalFailure: return "NumericalFailure";
    case ErrorCode::LengthMismatch: return "LengthMismatch";
    case ErrorCode::Empty: return "Empty";
    case ErrorCode::MixedKeys: return "MixedKeys";
    case ErrorCode::StationTooShort: return "StationTooShort";
    case ErrorCode::IoError: return "IoError";
    case ErrorCode::InvalidSpec: return "InvalidSpec";
    case ErrorCode::ConfigError: return "ConfigError";
  }
  return "Unknown";
}

}  // namespace gnsspred
