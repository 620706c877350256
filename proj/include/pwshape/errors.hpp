#pragma once

#include <stdexcept>
#include <string>

namespace pwshape {

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Argument outside the mathematical domain of an operation.
class DomainError : public Error {
 public:
  using Error::Error;
};

/// A gamma-type factor hit a pole.
class PoleError : public DomainError {
 public:
  using DomainError::DomainError;
};

class DimensionError : public Error {
 public:
  using Error::Error;
};

class NotPositiveDefiniteError : public Error {
 public:
  using Error::Error;
};

class RankDeficientError : public Error {
 public:
  using Error::Error;
};

class SingularBlockError : public Error {
 public:
  using Error::Error;
};

/// Quadrature, optimizer or oracle failed to reach its tolerance.
class NonConvergenceError : public Error {
 public:
  using Error::Error;
};

/// Malformed or inconsistent input data. Carries the offending line when known.
class DataError : public Error {
 public:
  explicit DataError(const std::string& what, int line = 0)
      : Error(line > 0 ? "line " + std::to_string(line) + ": " + what : what), line_(line) {}
  int line() const noexcept { return line_; }

 private:
  int line_ = 0;
};

}  // namespace pwshape
