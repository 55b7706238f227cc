#pragma once

#include <stdexcept>
#include <string>

namespace chabauty {

enum class Errc {
  DivisionByZero,
  OutOfDomain,
  PrecisionExhausted,
  Singular,
  NotSubalgebra,
  NonInvertibleFamily,
  NonConvergent,
  NotStabilized,
  NoWitnessNeeded,
  NotBlockConstant,
  RootOutOfDomain,
  InsufficientSamples,
  DegenerateParameter,
  ParseError,
  InvalidArgument,
};

const char* errc_name(Errc code);

class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& what);
  Errc code() const noexcept { return code_; }

 private:
  Errc code_;
};

}  // namespace chabauty
