#ifndef STELLAR_ERRORS_HPP
#define STELLAR_ERRORS_HPP

#include <stdexcept>
#include <string>
#include <string_view>

namespace stellar {

enum class ErrorCode {
  ZeroVector,
  InvalidParameter,
  CutoffTooSmall,
  DegenerateLeadingCoefficient,
  PrecisionLoss,
  ZeroOnContour,
  NoConvergence,
  ZeroCollision,
  StepFailure,
  UnsupportedHamiltonian,
  DegenerateInitialZeros,
  TrackingAmbiguity,
  TruncationLeakage,
  CountMismatch,
  InputError,
};

inline std::string_view to_string(ErrorCode code)
{
  switch (code) {
    case ErrorCode::ZeroVector: return "ZeroVector";
    case ErrorCode::InvalidParameter: return "InvalidParameter";
    case ErrorCode::CutoffTooSmall: return "CutoffTooSmall";
    case ErrorCode::DegenerateLeadingCoefficient: return "DegenerateLeadingCoefficient";
    case ErrorCode::PrecisionLoss: return "PrecisionLoss";
    case ErrorCode::ZeroOnContour: return "ZeroOnContour";
    case ErrorCode::NoConvergence: return "NoConvergence";
    case ErrorCode::ZeroCollision: return "ZeroCollision";
    case ErrorCode::StepFailure: return "StepFailure";
    case ErrorCode::UnsupportedHamiltonian: return "UnsupportedHamiltonian";
    case ErrorCode::DegenerateInitialZeros: return "DegenerateInitialZeros";
    case ErrorCode::TrackingAmbiguity: return "TrackingAmbiguity";
    case ErrorCode::TruncationLeakage: return "TruncationLeakage";
    case ErrorCode::CountMismatch: return "CountMismatch";
    case ErrorCode::InputError: return "InputError";
  }
  return "Unknown";
}

/// Every failure raised by the library carries one of the codes above.
class Error : public std::runtime_error {
public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code)
  {
  }

  ErrorCode code() const noexcept { return code_; }

private:
  ErrorCode code_;
};

/// Raised by the zero integrator when two zeros come closer than the gap threshold.
class ZeroCollisionError : public Error {
public:
  ZeroCollisionError(double time, double gap)
      : Error(ErrorCode::ZeroCollision,
              "zeros collide near t=" + std::to_string(time) + " (gap " + std::to_string(gap) + ")"),
        time_(time), gap_(gap)
  {
  }

  double time() const noexcept { return time_; }
  double gap() const noexcept { return gap_; }

private:
  double time_;
  double gap_;
};

} // namespace stellar

#endif // STELLAR_ERRORS_HPP
