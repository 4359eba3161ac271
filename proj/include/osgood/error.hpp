#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace osgood {

enum class ErrorCode {
  NonPositiveArgument,
  SearchDivergence,
  HypothesisViolated,
  InvalidModulus,
  InvalidExponent,
  InvalidLambda,
  InvalidField,
  EmptySequence,
  NonZeroMean,
  StepUnstable,
  WindowTooLow,
  ConfigError,
  IoError,
};

constexpr std::string_view to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::NonPositiveArgument: return "NonPositiveArgument";
    case ErrorCode::SearchDivergence: return "SearchDivergence";
    case ErrorCode::HypothesisViolated: return "HypothesisViolated";
    case ErrorCode::InvalidModulus: return "InvalidModulus";
    case ErrorCode::InvalidExponent: return "InvalidExponent";
    case ErrorCode::InvalidLambda: return "InvalidLambda";
    case ErrorCode::InvalidField: return "InvalidField";
    case ErrorCode::EmptySequence: return "EmptySequence";
    case ErrorCode::NonZeroMean: return "NonZeroMean";
    case ErrorCode::StepUnstable: return "StepUnstable";
    case ErrorCode::WindowTooLow: return "WindowTooLow";
    case ErrorCode::ConfigError: return "ConfigError";
    case ErrorCode::IoError: return "IoError";
  }
  return "Unknown";
}

/// All library failures are reported through this exception; `code()` names
/// the failure class so callers (and the CLI exit-code mapping) can branch.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace osgood
