#pragma once

#include <stdexcept>
#include <string>

namespace bailout {

// Raised when an argument lies outside an operation's domain (negative theta,
// unordered thresholds, Lambda < 1, ...).
class DomainError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Raised when a numerical procedure cannot deliver a result: root bracketing
// failed, the scale-function cache hit its range cap, and so on.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace bailout
