#include "rgeom/errors.hpp"

namespace rgeom {

std::string_view to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::NonZeroTrace: return "NonZeroTrace";
    case ErrorCode::NotPositiveDefinite: return "NotPositiveDefinite";
    case ErrorCode::NotUnimodular: return "NotUnimodular";
    case ErrorCode::DimensionTooSmall: return "DimensionTooSmall";
    case ErrorCode::BadParameter: return "BadParameter";
    case ErrorCode::GridTooCoarse: return "GridTooCoarse";
    case ErrorCode::ShapeMismatch: return "ShapeMismatch";
    case ErrorCode::DomainError: return "DomainError";
    case ErrorCode::EmptySchedule: return "EmptySchedule";
    case ErrorCode::ConvergenceFailure: return "ConvergenceFailure";
    case ErrorCode::ConfigError: return "ConfigError";
    case ErrorCode::IoError: return "IoError";
  }
  return "Unknown";
}

Error::Error(ErrorCode code, const std::string& what)
    : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

}  // namespace rgeom
