#pragma once

#include <stdexcept>
#include <string>

namespace steer {

// Every failure the library can signal. Values are stable: the C API exposes
// them verbatim (negated) and the CLI maps them to exit codes.
enum class ErrorCode : int {
  Ok = 0,
  Io,
  Parse,
  InvalidArgument,
  EmptyRow,
  NonPositiveWeight,
  Disconnected,
  DimensionMismatch,
  TooLarge,
  SingularSystem,
  IterationBudgetExceeded,
  Inconclusive,
  PreconditionUnmet,
  VerificationFailed,
  Internal,
};

const char* error_code_name(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, std::string message)
      : std::runtime_error(std::move(message)), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& message) {
  throw Error(code, message);
}

}  // namespace steer
