#include "macopt/errors.hpp"

namespace macopt {

const char* to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::NegativeDischarge: return "NegativeDischarge";
    case ErrorCode::InvalidModel: return "InvalidModel";
    case ErrorCode::InvalidParameters: return "InvalidParameters";
    case ErrorCode::EmptyInterval: return "EmptyInterval";
    case ErrorCode::InfeasibleStart: return "InfeasibleStart";
    case ErrorCode::NonFiniteObjective: return "NonFiniteObjective";
    case ErrorCode::OutOfInteriorRange: return "OutOfInteriorRange";
    case ErrorCode::SolverFailure: return "SolverFailure";
    case ErrorCode::TargetOutOfRange: return "TargetOutOfRange";
    case ErrorCode::PeerInfeasible: return "PeerInfeasible";
    case ErrorCode::TooManyUsers: return "TooManyUsers";
    case ErrorCode::PreconditionViolated: return "PreconditionViolated";
    case ErrorCode::InvalidConfig: return "InvalidConfig";
  }
  return "Unknown";
}

Error::Error(ErrorCode code, const std::string& message)
    : std::runtime_error(std::string(to_string(code)) + ": " + message), code_(code) {}

}  // namespace macopt
