#pragma once

#include <stdexcept>
#include <string>

namespace bergman {

/// Malformed or inconsistent input (dimension mismatch, bad spec, out-of-range
/// argument). The CLI maps this to exit status 1.
class InputError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Argument outside the mathematical domain of a function (e.g. a
/// nonpositive Beta argument, weight exponent s <= -1).
class DomainError : public InputError {
 public:
  using InputError::InputError;
};

}  // namespace bergman
