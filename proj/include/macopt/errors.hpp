#pragma once

#include <stdexcept>
#include <string>

namespace macopt {

enum class ErrorCode {
  NegativeDischarge,
  InvalidModel,
  InvalidParameters,
  EmptyInterval,
  InfeasibleStart,
  NonFiniteObjective,
  OutOfInteriorRange,
  SolverFailure,
  TargetOutOfRange,
  PeerInfeasible,
  TooManyUsers,
  PreconditionViolated,
  InvalidConfig,
};

const char* to_string(ErrorCode code) noexcept;

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message);

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace macopt
