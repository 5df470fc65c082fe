#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace ciro {

enum class ErrorCode {
  EmptyNetwork,
  NodeIndexMismatch,
  ArcSelfLoop,
  DanglingArc,
  DuplicateId,
  CountMismatch,
  InvalidCriticality,
  NegativeMass,
  SuccessOutOfRange,
  InvalidParameter,
  NonMonotoneBreakpoints,
  EmptySchedule,
  EmptyGrid,
  UnknownVariable,
  GridTooSmall,
  InvalidAction,
  StateSpaceTooLarge,
  PolicyFormat,
  ParseError,
  ValidationError,
};

constexpr std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::EmptyNetwork: return "EmptyNetwork";
    case ErrorCode::NodeIndexMismatch: return "NodeIndexMismatch";
    case ErrorCode::ArcSelfLoop: return "ArcSelfLoop";
    case ErrorCode::DanglingArc: return "DanglingArc";
    case ErrorCode::DuplicateId: return "DuplicateId";
    case ErrorCode::CountMismatch: return "CountMismatch";
    case ErrorCode::InvalidCriticality: return "InvalidCriticality";
    case ErrorCode::NegativeMass: return "NegativeMass";
    case ErrorCode::SuccessOutOfRange: return "SuccessOutOfRange";
    case ErrorCode::InvalidParameter: return "InvalidParameter";
    case ErrorCode::NonMonotoneBreakpoints: return "NonMonotoneBreakpoints";
    case ErrorCode::EmptySchedule: return "EmptySchedule";
    case ErrorCode::EmptyGrid: return "EmptyGrid";
    case ErrorCode::UnknownVariable: return "UnknownVariable";
    case ErrorCode::GridTooSmall: return "GridTooSmall";
    case ErrorCode::InvalidAction: return "InvalidAction";
    case ErrorCode::StateSpaceTooLarge: return "StateSpaceTooLarge";
    case ErrorCode::PolicyFormat: return "PolicyFormat";
    case ErrorCode::ParseError: return "ParseError";
    case ErrorCode::ValidationError: return "ValidationError";
  }
  return "Unknown";
}

// Every failure raised by the library carries a machine-checkable code.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(std::string(to_string(code)) + ": " + message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace ciro
