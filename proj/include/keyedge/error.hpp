#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace keyedge {

enum class ErrorCode {
  NonPositiveDepth,
  ZeroHeight,
  DegenerateObservation,
  UnobservableDistortion,
  InvalidDims,
  NonPositiveResult,
  AllDegenerate,
  EmptyInput,
  NonPositiveSigma,
  NoGroundTruth,
  InvalidArgument,
  ParseError,
  NonPositiveFocal,
  BehindCamera,
  ConfigError,
  IoError,
};

const char* to_string(ErrorCode code);

// Coarse classes used to pick a process exit code.
enum class ErrorClass { Usage, Parse, Io, Numeric };

ErrorClass classify(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message);

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

// Parse failure with 1-based line and field positions (0 when not applicable).
class ParseError : public Error {
 public:
  ParseError(std::size_t line, std::size_t field, const std::string& message);

  std::size_t line() const noexcept { return line_; }
  std::size_t field() const noexcept { return field_; }

 private:
  std::size_t line_;
  std::size_t field_;
};

}  // namespace keyedge
