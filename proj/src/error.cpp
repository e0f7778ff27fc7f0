#include "mtfe/error.hpp"

namespace mtfe {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::NonMonotone: return "NonMonotone";
    case ErrorCode::NonPositiveDensity: return "NonPositiveDensity";
    case ErrorCode::ZeroMass: return "ZeroMass";
    case ErrorCode::CoincidentNodes: return "CoincidentNodes";
    case ErrorCode::Diverged: return "Diverged";
    case ErrorCode::BlowupDetected: return "BlowupDetected";
    case ErrorCode::NonMonotoneResult: return "NonMonotoneResult";
    case ErrorCode::SingularMassMatrix: return "SingularMassMatrix";
    case ErrorCode::TimeStepUnderflow: return "TimeStepUnderflow";
    case ErrorCode::ResolutionMismatch: return "ResolutionMismatch";
    case ErrorCode::NonPositiveError: return "NonPositiveError";
    case ErrorCode::InstabilityDetected: return "InstabilityDetected";
    case ErrorCode::ConfigError: return "ConfigError";
  }
  return "Unknown";
}

}  // namespace mtfe
