#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace fingerkin {

enum class ErrorCode {
  Unsolvable,        // a loop-closure equation has no real root
  DegenerateLoop,    // A = B = 0, the loop does not constrain its angle
  OutOfJointLimits,
  OutOfMotorLimits,
  Unreachable,       // fingertip target outside the workspace
  SingularLoop,      // implicit-derivative denominator vanished
  NearSingular,      // Jacobian condition number over threshold
  Infeasible,        // joint-space plan cannot meet speed limits in time
  WaypointTimeout,
  InvalidParams,
  InvalidInput,
  LengthMismatch,
  NotClosed,
  EmptyInput,
  NonPositiveSigma,
  Io,
};

std::string_view to_string(ErrorCode code);

/// Every failure in the library surfaces as this exception. `loop()` is the
/// loop-closure equation index (2..5) when the failure belongs to one, else 0.
class FingerError : public std::runtime_error {
 public:
  FingerError(ErrorCode code, const std::string& what, int loop = 0)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code), loop_(loop) {}

  ErrorCode code() const noexcept { return code_; }
  int loop() const noexcept { return loop_; }

 private:
  ErrorCode code_;
  int loop_;
};

inline std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::Unsolvable: return "Unsolvable";
    case ErrorCode::DegenerateLoop: return "DegenerateLoop";
    case ErrorCode::OutOfJointLimits: return "OutOfJointLimits";
    case ErrorCode::OutOfMotorLimits: return "OutOfMotorLimits";
    case ErrorCode::Unreachable: return "Unreachable";
    case ErrorCode::SingularLoop: return "SingularLoop";
    case ErrorCode::NearSingular: return "NearSingular";
    case ErrorCode::Infeasible: return "Infeasible";
    case ErrorCode::WaypointTimeout: return "WaypointTimeout";
    case ErrorCode::InvalidParams: return "InvalidParams";
    case ErrorCode::InvalidInput: return "InvalidInput";
    case ErrorCode::LengthMismatch: return "LengthMismatch";
    case ErrorCode::NotClosed: return "NotClosed";
    case ErrorCode::EmptyInput: return "EmptyInput";
    case ErrorCode::NonPositiveSigma: return "NonPositiveSigma";
    case ErrorCode::Io: return "Io";
  }
  return "Unknown";
}

}  // namespace fingerkin
