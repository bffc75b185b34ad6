#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace rgeom {

enum class ErrorCode {
  NonZeroTrace,
  NotPositiveDefinite,
  NotUnimodular,
  DimensionTooSmall,
  BadParameter,
  GridTooCoarse,
  ShapeMismatch,
  DomainError,
  EmptySchedule,
  ConvergenceFailure,
  ConfigError,
  IoError,
};

std::string_view to_string(ErrorCode code) noexcept;

/// Single exception type for the library; callers branch on code().
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what);

  [[nodiscard]] ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace rgeom
