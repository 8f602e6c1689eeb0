#include "curvednet/error.hpp"

namespace curvednet {

std::string_view to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::ZeroVector: return "ZeroVector";
    case ErrorCode::BadCurvature: return "BadCurvature";
    case ErrorCode::CurvatureMismatch: return "CurvatureMismatch";
    case ErrorCode::OutsideBall: return "OutsideBall";
    case ErrorCode::DegenerateMap: return "DegenerateMap";
    case ErrorCode::Singularity: return "Singularity";
    case ErrorCode::DimMismatch: return "DimMismatch";
    case ErrorCode::BadLabel: return "BadLabel";
    case ErrorCode::NonScalarOutput: return "NonScalarOutput";
    case ErrorCode::NonFiniteGradient: return "NonFiniteGradient";
    case ErrorCode::EmptyDataset: return "EmptyDataset";
    case ErrorCode::NonFiniteLoss: return "NonFiniteLoss";
    case ErrorCode::EmptyComponents: return "EmptyComponents";
    case ErrorCode::LengthMismatch: return "LengthMismatch";
    case ErrorCode::OneClassOnly: return "OneClassOnly";
    case ErrorCode::BadSpec: return "BadSpec";
    case ErrorCode::ParseError: return "ParseError";
    case ErrorCode::DimInconsistent: return "DimInconsistent";
    case ErrorCode::UnknownSplitTag: return "UnknownSplitTag";
    case ErrorCode::TrainPurity: return "TrainPurity";
    case ErrorCode::ClassTooSmall: return "ClassTooSmall";
    case ErrorCode::IoError: return "IoError";
    case ErrorCode::ModelFormat: return "ModelFormat";
    case ErrorCode::ModelDataDimMismatch: return "ModelDataDimMismatch";
    case ErrorCode::EmptyScores: return "EmptyScores";
    case ErrorCode::ConfigError: return "ConfigError";
    case ErrorCode::InvariantViolation: return "InvariantViolation";
  }
  return "Unknown";
}

}  // namespace curvednet
