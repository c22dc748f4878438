#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace scenbound {

enum class ErrorCode {
  LengthMismatch,
  NonMonotoneValues,
  NonFiniteValue,
  InvalidLabels,
  IndexOutOfRange,
  LabelMismatch,
  EmptyInput,
  EmptySamples,
  InvalidArgument,
  MissingColumn,
  BadNumber,
  EmptyFile,
  ScenarioMissing,
  IncompleteQuantileSet,
  NoPreDivergenceWeeks,
  Io,
};

constexpr std::string_view to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::LengthMismatch: return "LengthMismatch";
    case ErrorCode::NonMonotoneValues: return "NonMonotoneValues";
    case ErrorCode::NonFiniteValue: return "NonFiniteValue";
    case ErrorCode::InvalidLabels: return "InvalidLabels";
    case ErrorCode::IndexOutOfRange: return "IndexOutOfRange";
    case ErrorCode::LabelMismatch: return "LabelMismatch";
    case ErrorCode::EmptyInput: return "EmptyInput";
    case ErrorCode::EmptySamples: return "EmptySamples";
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::MissingColumn: return "MissingColumn";
    case ErrorCode::BadNumber: return "BadNumber";
    case ErrorCode::EmptyFile: return "EmptyFile";
    case ErrorCode::ScenarioMissing: return "ScenarioMissing";
    case ErrorCode::IncompleteQuantileSet: return "IncompleteQuantileSet";
    case ErrorCode::NoPreDivergenceWeeks: return "NoPreDivergenceWeeks";
    case ErrorCode::Io: return "Io";
  }
  return "Unknown";
}

/// Every failure in the library is reported through this type; `code()`
/// is stable and meant for programmatic dispatch, `what()` for humans.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(std::string(to_string(code)) + ": " + message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace scenbound
