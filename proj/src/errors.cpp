#include "errors.hpp"

namespace steer {

const char* error_code_name(ErrorCode code) {
  switch (code) {
    case ErrorCode::Ok: return "ok";
    case ErrorCode::Io: return "io";
    case ErrorCode::Parse: return "parse";
    case ErrorCode::InvalidArgument: return "invalid_argument";
    case ErrorCode::EmptyRow: return "empty_row";
    case ErrorCode::NonPositiveWeight: return "non_positive_weight";
    case ErrorCode::Disconnected: return "disconnected";
    case ErrorCode::DimensionMismatch: return "dimension_mismatch";
    case ErrorCode::TooLarge: return "too_large";
    case ErrorCode::SingularSystem: return "singular_system";
    case ErrorCode::IterationBudgetExceeded: return "iteration_budget_exceeded";
    case ErrorCode::Inconclusive: return "inconclusive";
    case ErrorCode::PreconditionUnmet: return "precondition_unmet";
    case ErrorCode::VerificationFailed: return "verification_failed";
    case ErrorCode::Internal: return "internal";
  }
  return "unknown";
}

}  // namespace steer
