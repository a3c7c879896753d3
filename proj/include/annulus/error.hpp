#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace annulus {

enum class ErrorCode {
  InvalidGeometry,
  InvalidPhysics,
  GridMismatch,
  TooCoarse,
  SingularSystem,
  EigSolverFailure,
  NoBracket,
  DegenerateCoefficient,
  CFLViolation,
  SolverFailure,
  NoEscape,
  InvalidSpec,
};

constexpr std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::InvalidGeometry: return "InvalidGeometry";
    case ErrorCode::InvalidPhysics: return "InvalidPhysics";
    case ErrorCode::GridMismatch: return "GridMismatch";
    case ErrorCode::TooCoarse: return "TooCoarse";
    case ErrorCode::SingularSystem: return "SingularSystem";
    case ErrorCode::EigSolverFailure: return "EigSolverFailure";
    case ErrorCode::NoBracket: return "NoBracket";
    case ErrorCode::DegenerateCoefficient: return "DegenerateCoefficient";
    case ErrorCode::CFLViolation: return "CFLViolation";
    case ErrorCode::SolverFailure: return "SolverFailure";
    case ErrorCode::NoEscape: return "NoEscape";
    case ErrorCode::InvalidSpec: return "InvalidSpec";
  }
  return "Unknown";
}

/// Every failure raised by the library carries one of the codes above so the
/// CLI can map it onto an exit status.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace annulus
