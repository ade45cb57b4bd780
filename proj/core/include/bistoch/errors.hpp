#pragma once

#include <stdexcept>
#include <string>

namespace bistoch {

/// Base class for all library errors.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Invalid arguments, malformed files, dimension mismatches.
class InputError : public Error {
 public:
  using Error::Error;
};

/// Numerical breakdown: underflow, failed quadrature, eigensolver failure.
class NumericError : public Error {
 public:
  using Error::Error;
};

/// An operation was requested in a regime where its conditioning is unusable
/// (e.g. dividing by a near-zero eigenvalue).
class ConditioningError : public NumericError {
 public:
  using NumericError::NumericError;
};

}  // namespace bistoch
