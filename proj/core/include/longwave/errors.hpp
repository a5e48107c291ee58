#pragma once

#include <stdexcept>
#include <string>

namespace longwave {

/// Base of every error the library throws.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Bad input: malformed files, inconsistent shapes, invalid parameters.
/// The CLI maps these to exit code 2.
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// A numerical procedure could not deliver its contract.
/// The CLI maps these to exit code 3.
class NumericalError : public Error {
 public:
  using Error::Error;
};

class ShapeMismatch : public ConfigError {
 public:
  using ConfigError::ConfigError;
};

class SolvabilityViolated : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

class IterationLimit : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

class BlowUp : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

class CflViolation : public ConfigError {
 public:
  using ConfigError::ConfigError;
};

/// Domain and cell are incompatible along `axis` (1-based).
class IncompatibleDomain : public ConfigError {
 public:
  IncompatibleDomain(int axis, const std::string& what)
      : ConfigError(what), axis_(axis) {}
  int axis() const noexcept { return axis_; }

 private:
  int axis_;
};

}  // namespace longwave
