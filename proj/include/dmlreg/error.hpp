#pragma once

#include <stdexcept>
#include <string>

namespace dmlreg {

enum class ErrorCode {
  DimensionMismatch,
  NotSPD,
  Singular,
  InvalidRange,
  InvalidScale,
  InvalidHyperparameter,
  InvalidConfig,
  EmptyPairSet,
  DegeneratePairs,
  TooManyPairs,
  TooFewRows,
  NonBinaryResponse,
  NonFiniteInput,
  ParseError,
  IoError,
};

const char* to_string(ErrorCode code);

// Process exit status for the CLI: 2 config, 3 data, 4 numerical failure.
int exit_code_for(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] void fail(ErrorCode code, const std::string& message);

}  // namespace dmlreg
