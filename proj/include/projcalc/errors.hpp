#pragma once

#include <stdexcept>
#include <string>

namespace projcalc {

// Bad construction parameters (exponent out of range, nonpositive weight...).
class InvalidConfig : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

class DimensionMismatch : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// The input sits on a singularity of the operation (e.g. the origin for
// the smoothness functional).
class DegenerateInput : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

// A documented precondition of an operation does not hold for its input.
class PreconditionError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

// The operation is not defined for the requested set variant.
class UnsupportedSet : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// The projection has no Frechet derivative at the requested point.
class NoFrechetDerivative : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

}  // namespace projcalc
