#pragma once

#include <stdexcept>
#include <string>

namespace oisma {

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Argument outside the mathematical domain of an operation (NaN, negative, > max).
class DomainError : public Error {
 public:
  using Error::Error;
};

/// Malformed text input (dataset files, CSV, config).
class ParseError : public Error {
 public:
  using Error::Error;
};

/// Well-formed input that violates a structural invariant.
class ValidationError : public Error {
 public:
  using Error::Error;
};

/// Both stochastic operands come from the same biased dataset.
class CorrelationError : public Error {
 public:
  using Error::Error;
};

class DimensionError : public Error {
 public:
  using Error::Error;
};

class CapacityError : public Error {
 public:
  using Error::Error;
};

/// Row/column index or bit-vector width out of range.
class RangeError : public Error {
 public:
  using Error::Error;
};

}  // namespace oisma
