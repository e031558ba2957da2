#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace pmscale {

enum class ErrorCode {
  NonPositiveWeight,
  NotNormalized,
  EmptyInput,
  DimensionMismatch,
  EntryOutOfRange,
  LengthMismatch,
  NonPositiveEntry,
  DimensionTooLarge,
  WrongShape,
  RootBracketFailure,
  TooLarge,
  NotSquare,
  NotZeroOne,
  SymbolOutOfRange,
  InvalidArgument,
  ParseError,
};

constexpr std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::NonPositiveWeight: return "NonPositiveWeight";
    case ErrorCode::NotNormalized: return "NotNormalized";
    case ErrorCode::EmptyInput: return "EmptyInput";
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::EntryOutOfRange: return "EntryOutOfRange";
    case ErrorCode::LengthMismatch: return "LengthMismatch";
    case ErrorCode::NonPositiveEntry: return "NonPositiveEntry";
    case ErrorCode::DimensionTooLarge: return "DimensionTooLarge";
    case ErrorCode::WrongShape: return "WrongShape";
    case ErrorCode::RootBracketFailure: return "RootBracketFailure";
    case ErrorCode::TooLarge: return "TooLarge";
    case ErrorCode::NotSquare: return "NotSquare";
    case ErrorCode::NotZeroOne: return "NotZeroOne";
    case ErrorCode::SymbolOutOfRange: return "SymbolOutOfRange";
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::ParseError: return "ParseError";
  }
  return "Unknown";
}

/// Exception carrying a machine-checkable code; every failure in the library
/// surfaces as one of these.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

  /// Size guards (permanent ceilings, oracle dimension limits).
  bool is_limit() const noexcept {
    return code_ == ErrorCode::TooLarge || code_ == ErrorCode::DimensionTooLarge;
  }

 private:
  ErrorCode code_;
};

}  // namespace pmscale
