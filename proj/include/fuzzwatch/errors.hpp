#pragma once

#include <stdexcept>
#include <string>

namespace fuzzwatch {

/// Base of all library errors.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Invalid parameters or inconsistent configuration (CLI exit code 2).
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// A precondition on a call was violated by the caller.
class UsageError : public Error {
 public:
  using Error::Error;
};

/// Argument outside the mathematical domain of a formula.
class DomainError : public Error {
 public:
  using Error::Error;
};

/// chi = 0: the two levels produce the same cross section.
class DegenerateMeasurementError : public Error {
 public:
  using Error::Error;
};

/// delta_d = 0: the level resolution time is infinite.
class InfiniteFuzzinessError : public Error {
 public:
  using Error::Error;
};

/// Numeric failure during integration (overflow, NaN).
class IntegrationError : public Error {
 public:
  using Error::Error;
};

}  // namespace fuzzwatch
