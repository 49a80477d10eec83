#ifndef HYPVOL_ERROR_HPP
#define HYPVOL_ERROR_HPP

#include <stdexcept>
#include <string>

namespace hypvol {

// Base of every exception thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class DimensionMismatch : public Error {
 public:
  using Error::Error;
};

// A constraint (group membership, tangency, fixed point, ...) does not hold.
class InvariantViolation : public Error {
 public:
  using Error::Error;
};

class PreconditionViolation : public Error {
 public:
  using Error::Error;
};

// Iterative method ran out of budget or diverged.
class ConvergenceFailure : public Error {
 public:
  using Error::Error;
};

class ParseError : public Error {
 public:
  using Error::Error;
};

}  // namespace hypvol

#endif  // HYPVOL_ERROR_HPP
