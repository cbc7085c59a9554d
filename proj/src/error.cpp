#include "keyedge/error.hpp"

namespace keyedge {

const char* to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::NonPositiveDepth: return "NonPositiveDepth";
    case ErrorCode::ZeroHeight: return "ZeroHeight";
    case ErrorCode::DegenerateObservation: return "DegenerateObservation";
    case ErrorCode::UnobservableDistortion: return "UnobservableDistortion";
    case ErrorCode::InvalidDims: return "InvalidDims";
    case ErrorCode::NonPositiveResult: return "NonPositiveResult";
    case ErrorCode::AllDegenerate: return "AllDegenerate";
    case ErrorCode::EmptyInput: return "EmptyInput";
    case ErrorCode::NonPositiveSigma: return "NonPositiveSigma";
    case ErrorCode::NoGroundTruth: return "NoGroundTruth";
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::ParseError: return "ParseError";
    case ErrorCode::NonPositiveFocal: return "NonPositiveFocal";
    case ErrorCode::BehindCamera: return "BehindCamera";
    case ErrorCode::ConfigError: return "ConfigError";
    case ErrorCode::IoError: return "IoError";
  }
  return "Unknown";
}

ErrorClass classify(ErrorCode code) {
  switch (code) {
    case ErrorCode::ParseError:
    case ErrorCode::NonPositiveFocal:
      return ErrorClass::Parse;
    case ErrorCode::IoError:
      return ErrorClass::Io;
    case ErrorCode::ConfigError:
    case ErrorCode::InvalidArgument:
      return ErrorClass::Usage;
    default:
      return ErrorClass::Numeric;
  }
}

Error::Error(ErrorCode code, const std::string& message)
    : std::runtime_error(std::string(to_string(code)) + ": " + message), code_(code) {}

ParseError::ParseError(std::size_t line, std::size_t field, const std::string& message)
    : Error(ErrorCode::ParseError,
            "line " + std::to_string(line) + ", field " + std::to_string(field) + ": " + message),
      line_(line),
      field_(field) {}

}  // namespace keyedge
