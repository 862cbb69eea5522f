#pragma once

#include <stdexcept>
#include <string>

namespace entropylab {

/// Base of every exception thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Operands of incompatible dimension.
class DimensionError : public Error {
 public:
  using Error::Error;
};

/// A value violates the invariants of the type it is meant to become.
class ValidationError : public Error {
 public:
  using Error::Error;
};

/// Malformed or unsupported serialized input.
class ParseError : public Error {
 public:
  using Error::Error;
};

/// A routine was called outside the hypothesis it needs.
class HypothesisError : public Error {
 public:
  using Error::Error;
};

class ConvergenceError : public Error {
 public:
  ConvergenceError(const std::string& what, double residual)
      : Error(what + " (residual " + std::to_string(residual) + ")"), residual_(residual) {}

  double residual() const noexcept { return residual_; }

 private:
  double residual_;
};

}  // namespace entropylab
