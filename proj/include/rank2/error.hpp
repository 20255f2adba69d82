#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace rank2 {

enum class ErrorCode {
  InvalidPrecision,
  MalformedConfig,
  NonMUMOperator,
  OutsideDisc,
  StepUnderflow,
  PathTooCloseToSingularity,
  SingularPoint,
  NonIntegralEuler,
  NotAnInvolution,
  DegenerateComplement,
  VanishingPeriod,
  DegenerateSpan,
  DependentCharges,
  NoKernel,
  RecognitionFailure,
  NonIntegralLeadingPower,
  BadReductionPrime,
  ParseError,
  ValidationError,
  MissingPrime,
  UnknownSign,
  AmbiguousSign,
  InsufficientCoefficients,
  NonIntegralBasis,
  VanishingDenominator,
  NotInUpperHalfPlane,
  NonRealResult,
  IoError,
};

inline std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::InvalidPrecision: return "InvalidPrecision";
    case ErrorCode::MalformedConfig: return "MalformedConfig";
    case ErrorCode::NonMUMOperator: return "NonMUMOperator";
    case ErrorCode::OutsideDisc: return "OutsideDisc";
    case ErrorCode::StepUnderflow: return "StepUnderflow";
    case ErrorCode::PathTooCloseToSingularity: return "PathTooCloseToSingularity";
    case ErrorCode::SingularPoint: return "SingularPoint";
    case ErrorCode::NonIntegralEuler: return "NonIntegralEuler";
    case ErrorCode::NotAnInvolution: return "NotAnInvolution";
    case ErrorCode::DegenerateComplement: return "DegenerateComplement";
    case ErrorCode::VanishingPeriod: return "VanishingPeriod";
    case ErrorCode::DegenerateSpan: return "DegenerateSpan";
    case ErrorCode::DependentCharges: return "DependentCharges";
    case ErrorCode::NoKernel: return "NoKernel";
    case ErrorCode::RecognitionFailure: return "RecognitionFailure";
    case ErrorCode::NonIntegralLeadingPower: return "NonIntegralLeadingPower";
    case ErrorCode::BadReductionPrime: return "BadReductionPrime";
    case ErrorCode::ParseError: return "ParseError";
    case ErrorCode::ValidationError: return "ValidationError";
    case ErrorCode::MissingPrime: return "MissingPrime";
    case ErrorCode::UnknownSign: return "UnknownSign";
    case ErrorCode::AmbiguousSign: return "AmbiguousSign";
    case ErrorCode::InsufficientCoefficients: return "InsufficientCoefficients";
    case ErrorCode::NonIntegralBasis: return "NonIntegralBasis";
    case ErrorCode::VanishingDenominator: return "VanishingDenominator";
    case ErrorCode::NotInUpperHalfPlane: return "NotInUpperHalfPlane";
    case ErrorCode::NonRealResult: return "NonRealResult";
    case ErrorCode::IoError: return "IoError";
  }
  return "Unknown";
}

/// Every failure in the library is reported through this exception; `code()`
/// identifies the failure class so callers can branch without string matching.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(std::string(to_string(code)) + ": " + message), code_(code) {}

  [[nodiscard]] ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace rank2
