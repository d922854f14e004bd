#pragma once

#include <stdexcept>
#include <string>

namespace wbavg {

// Base for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Invalid arguments: bad parameters, violated preconditions.
class DomainError : public Error {
 public:
  using Error::Error;
};

class PrecisionError : public DomainError {
 public:
  using DomainError::DomainError;
};

class DimensionMismatch : public DomainError {
 public:
  using DomainError::DomainError;
};

class NotHermitian : public DomainError {
 public:
  using DomainError::DomainError;
};

// Density operator with trace away from 1, or a non-normalized pure state.
class TraceError : public DomainError {
 public:
  using DomainError::DomainError;
};

// A frequency sits on the integer lattice, so the gap-based rate does not apply.
class ResonantFrequency : public DomainError {
 public:
  using DomainError::DomainError;
};

// Iterative numerics that failed to meet their tolerance.
class ConvergenceError : public Error {
 public:
  ConvergenceError(const std::string& what, std::string previous, std::string last)
      : Error(what), previous_(std::move(previous)), last_(std::move(last)) {}

  const std::string& previous_estimate() const { return previous_; }
  const std::string& last_estimate() const { return last_; }

 private:
  std::string previous_;
  std::string last_;
};

// Values fell under the precision floor; the caller should raise mantissa bits.
class PrecisionLimited : public Error {
 public:
  using Error::Error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

}  // namespace wbavg
