#include "dmlreg/error.hpp"

namespace dmlreg {

const char* to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::NotSPD: return "NotSPD";
    case ErrorCode::Singular: return "Singular";
    case ErrorCode::InvalidRange: return "InvalidRange";
    case ErrorCode::InvalidScale: return "InvalidScale";
    case ErrorCode::InvalidHyperparameter: return "InvalidHyperparameter";
    case ErrorCode::InvalidConfig: return "InvalidConfig";
    case ErrorCode::EmptyPairSet: return "EmptyPairSet";
    case ErrorCode::DegeneratePairs: return "DegeneratePairs";
    case ErrorCode::TooManyPairs: return "TooManyPairs";
    case ErrorCode::TooFewRows: return "TooFewRows";
    case ErrorCode::NonBinaryResponse: return "NonBinaryResponse";
    case ErrorCode::NonFiniteInput: return "NonFiniteInput";
    case ErrorCode::ParseError: return "ParseError";
    case ErrorCode::IoError: return "IoError";
  }
  return "Unknown";
}

int exit_code_for(ErrorCode code) {
  switch (code) {
    case ErrorCode::InvalidRange:
    case ErrorCode::InvalidScale:
    case ErrorCode::InvalidHyperparameter:
    case ErrorCode::InvalidConfig:
    case ErrorCode::TooManyPairs:
      return 2;
    case ErrorCode::NotSPD:
    case ErrorCode::Singular:
      return 4;
    default:
      return 3;
  }
}

void fail(ErrorCode code, const std::string& message) {
  throw Error(code, std::string(to_string(code)) + ": " + message);
}

}  // namespace dmlreg
