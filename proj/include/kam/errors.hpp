#pragma once

#include <stdexcept>
#include <string>

namespace kam {

/// Base class for every failure raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Incompatible dimensions, shapes, cutoffs or out-of-range arguments.
class ShapeError : public Error {
 public:
  using Error::Error;
};

/// A small divisor fell below the configured resonance tolerance.
class ResonanceError : public Error {
 public:
  using Error::Error;
};

/// A map or conjugacy left the region where the operation is defined
/// (near-identity guard, validity radius, singular Jacobian).
class DomainError : public Error {
 public:
  using Error::Error;
};

/// An iteration diverged or ran out of iterations.
class ConvergenceError : public Error {
 public:
  using Error::Error;
};

/// Malformed or inconsistent problem configuration.
class ConfigError : public Error {
 public:
  using Error::Error;
};

}  // namespace kam
