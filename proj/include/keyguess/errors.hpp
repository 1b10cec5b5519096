#pragma once

#include <stdexcept>
#include <string>

namespace keyguess {

/// Base of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Input object violates a structural invariant (non-stochastic rows,
/// broken bijection, Kraft violation, reducible chain).
class ValidationError : public Error {
 public:
  using Error::Error;
};

/// Argument outside the mathematical domain of an operation.
class DomainError : public Error {
 public:
  using Error::Error;
};

/// Enumeration or materialization cap exceeded.
class SizeError : public Error {
 public:
  using Error::Error;
};

/// Iterative method failed to converge.
class NumericalError : public Error {
 public:
  using Error::Error;
};

/// Sampled data does not have a property the operation requires.
class DataError : public Error {
 public:
  using Error::Error;
};

}  // namespace keyguess
