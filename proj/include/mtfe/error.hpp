#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace mtfe {

enum class ErrorCode {
  NonMonotone,
  NonPositiveDensity,
  ZeroMass,
  CoincidentNodes,
  Diverged,
  BlowupDetected,
  NonMonotoneResult,
  SingularMassMatrix,
  TimeStepUnderflow,
  ResolutionMismatch,
  NonPositiveError,
  InstabilityDetected,
  ConfigError,
};

std::string_view to_string(ErrorCode code);

// Every recoverable numerical failure in the library is reported through this type.
class SolverError : public std::runtime_error {
 public:
  SolverError(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace mtfe
