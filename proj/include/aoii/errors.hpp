#pragma once

#include <stdexcept>
#include <string>

namespace aoii {

// Error taxonomy shared by the library, the CLI exit-code mapping and the
// Python exception translation.
enum class ErrorCode {
  kNegativeEntry,
  kRowSumViolation,
  kNotStrictlySubstochastic,
  kArgumentOutOfRange,
  kSingularMatrix,
  kSingularSystem,
  kIsolatedState,
  kDegenerateState,
  kNotUnichain,
  kSearchSpaceTooLarge,
  kInvalidPolicy,
  kMinimumSampleSize,
  kValidationFailure,
  kConfigError,
  kIoError,
};

inline const char* error_code_name(ErrorCode code) {
  switch (code) {
    case ErrorCode::kNegativeEntry: return "NegativeEntry";
    case ErrorCode::kRowSumViolation: return "RowSumViolation";
    case ErrorCode::kNotStrictlySubstochastic: return "NotStrictlySubstochastic";
    case ErrorCode::kArgumentOutOfRange: return "ArgumentOutOfRange";
    case ErrorCode::kSingularMatrix: return "SingularMatrix";
    case ErrorCode::kSingularSystem: return "SingularSystem";
    case ErrorCode::kIsolatedState: return "IsolatedState";
    case ErrorCode::kDegenerateState: return "DegenerateState";
    case ErrorCode::kNotUnichain: return "NotUnichain";
    case ErrorCode::kSearchSpaceTooLarge: return "SearchSpaceTooLarge";
    case ErrorCode::kInvalidPolicy: return "InvalidPolicy";
    case ErrorCode::kMinimumSampleSize: return "MinimumSampleSize";
    case ErrorCode::kValidationFailure: return "ValidationFailure";
    case ErrorCode::kConfigError: return "ConfigError";
    case ErrorCode::kIoError: return "IoError";
  }
  return "UnknownError";
}

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(message), code_(code) {}

  ErrorCode code() const { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& message) {
  throw Error(code, message);
}

}  // namespace aoii
