#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace nhdyn {

// Base of every failure raised by the toolkit. The CLI maps ValidationError
// to exit status 2 and everything else to 3.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ValidationError : public Error {
 public:
  using Error::Error;
};

class DimensionError : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

class NumericRangeError : public Error {
 public:
  using Error::Error;
};

class ConvergenceError : public Error {
 public:
  ConvergenceError(const std::string& what, double residual)
      : Error(what), residual_(residual) {}
  double residual() const noexcept { return residual_; }

 private:
  double residual_;
};

class DegenerateSpectrumError : public Error {
 public:
  DegenerateSpectrumError(const std::string& what, std::size_t first, std::size_t second)
      : Error(what), first_(first), second_(second) {}
  std::size_t first() const noexcept { return first_; }
  std::size_t second() const noexcept { return second_; }

 private:
  std::size_t first_;
  std::size_t second_;
};

class TruncationError : public Error {
 public:
  using Error::Error;
};

class InstabilityError : public Error {
 public:
  using Error::Error;
};

// Raised when an operation needs an operator certified in some class
// (e.g. a gamma-symmetry) and the certificate fails.
class CertificationError : public Error {
 public:
  using Error::Error;
};

class ClosedFormUnavailable : public Error {
 public:
  using Error::Error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

}  // namespace nhdyn
