#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace curvednet {

enum class ErrorCode {
  ZeroVector,
  BadCurvature,
  CurvatureMismatch,
  OutsideBall,
  DegenerateMap,
  Singularity,
  DimMismatch,
  BadLabel,
  NonScalarOutput,
  NonFiniteGradient,
  EmptyDataset,
  NonFiniteLoss,
  EmptyComponents,
  LengthMismatch,
  OneClassOnly,
  BadSpec,
  ParseError,
  DimInconsistent,
  UnknownSplitTag,
  TrainPurity,
  ClassTooSmall,
  IoError,
  ModelFormat,
  ModelDataDimMismatch,
  EmptyScores,
  ConfigError,
  InvariantViolation,
};

std::string_view to_string(ErrorCode code) noexcept;

/// Single exception type for the library; callers branch on code().
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace curvednet
