#pragma once

#include <stdexcept>
#include <string>

namespace mtypes {

enum class ErrorCode {
  ExactUnavailable,
  DomainTooSmall,
  MismatchedTypes,
  AlphabetMismatch,
  BudgetExceeded,
  EmptyFeasibleSet,
  InfeasibleMoment,
  NoConvergence,
  FeasibilityError,
  EmptyIntersection,
  BallOverlap,
  PrefixTooLong,
  PreconditionViolated,
  InvalidConfig,
};

inline const char* error_code_name(ErrorCode c) {
  switch (c) {
    case ErrorCode::ExactUnavailable: return "ExactUnavailable";
    case ErrorCode::DomainTooSmall: return "DomainTooSmall";
    case ErrorCode::MismatchedTypes: return "MismatchedTypes";
    case ErrorCode::AlphabetMismatch: return "AlphabetMismatch";
    case ErrorCode::BudgetExceeded: return "BudgetExceeded";
    case ErrorCode::EmptyFeasibleSet: return "EmptyFeasibleSet";
    case ErrorCode::InfeasibleMoment: return "InfeasibleMoment";
    case ErrorCode::NoConvergence: return "NoConvergence";
    case ErrorCode::FeasibilityError: return "FeasibilityError";
    case ErrorCode::EmptyIntersection: return "EmptyIntersection";
    case ErrorCode::BallOverlap: return "BallOverlap";
    case ErrorCode::PrefixTooLong: return "PrefixTooLong";
    case ErrorCode::PreconditionViolated: return "PreconditionViolated";
    case ErrorCode::InvalidConfig: return "InvalidConfig";
  }
  return "Unknown";
}

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(error_code_name(code)) + ": " + what),
        code_(code) {}

  ErrorCode code() const { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace mtypes
