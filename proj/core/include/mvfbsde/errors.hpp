#pragma once

#include <stdexcept>
#include <string>

namespace mvfbsde {

enum class ErrorCode {
  NonPositiveHorizon,
  WeightOverflow,
  ShapeMismatch,
  DimensionMismatch,
  Exact1dOnMultiD,
  NonFiniteState,
  GateViolated,
  IllConditionedRegression,
  NoConvergence,
  UnknownProblem,
  SingularR,
  MissingConstant,
  MissingDerivative,
  ArgminDiverged,
  RiccatiBlowup,
  ConfigParse,
};

inline const char* error_code_name(ErrorCode c) {
  switch (c) {
    case ErrorCode::NonPositiveHorizon: return "NonPositiveHorizon";
    case ErrorCode::WeightOverflow: return "WeightOverflow";
    case ErrorCode::ShapeMismatch: return "ShapeMismatch";
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::Exact1dOnMultiD: return "Exact1dOnMultiD";
    case ErrorCode::NonFiniteState: return "NonFiniteState";
    case ErrorCode::GateViolated: return "GateViolated";
    case ErrorCode::IllConditionedRegression: return "IllConditionedRegression";
    case ErrorCode::NoConvergence: return "NoConvergence";
    case ErrorCode::UnknownProblem: return "UnknownProblem";
    case ErrorCode::SingularR: return "SingularR";
    case ErrorCode::MissingConstant: return "MissingConstant";
    case ErrorCode::MissingDerivative: return "MissingDerivative";
    case ErrorCode::ArgminDiverged: return "ArgminDiverged";
    case ErrorCode::RiccatiBlowup: return "RiccatiBlowup";
    case ErrorCode::ConfigParse: return "ConfigParse";
  }
  return "Unknown";
}

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(error_code_name(code)) + ": " + what), code_(code) {}

  ErrorCode code() const { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace mvfbsde
