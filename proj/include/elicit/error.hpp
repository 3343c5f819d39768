#pragma once

#include <stdexcept>
#include <string>

namespace elicit {

enum class Errc {
  NegativeEntry,
  SumNotOne,
  TooFewOutcomes,
  InvalidStep,
  EmptyActionSet,
  DimensionMismatch,
  IndexOutOfRange,
  ExpectedPaymentMismatch,
  NotBinary,
  NoBracket,
  EmptyFeasibleSet,
  BoundaryPoint,
  UnsupportedForN,
  InvalidArgument,
  ParseError,
  ValidationError,
};

/// Library-wide exception. Validation messages include the offending path
/// (e.g. "experts[1].technologies[0].support") when one is known.
class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& message)
      : std::runtime_error(message), code_(code) {}

  Errc code() const noexcept { return code_; }

 private:
  Errc code_;
};

}  // namespace elicit
