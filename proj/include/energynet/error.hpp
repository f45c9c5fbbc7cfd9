#pragma once

#include <stdexcept>
#include <string>

namespace energynet {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Operand shapes disagree. The message names the offending operand.
class DimensionError : public Error {
 public:
  using Error::Error;
};

/// A precondition on a value (not a shape) was violated.
class InvalidArgument : public Error {
 public:
  using Error::Error;
};

/// Exact enumeration refused because the state space is too large.
class IntractableError : public Error {
 public:
  using Error::Error;
};

/// Infinite-RBM tail would not converge (geometric ratio >= 1).
class DivergenceError : public Error {
 public:
  using Error::Error;
};

/// NaN/Inf appeared in an estimate or an input.
class NumericError : public Error {
 public:
  using Error::Error;
};

/// Malformed, truncated or mismatched input file.
class FormatError : public Error {
 public:
  using Error::Error;
};

}  // namespace energynet
