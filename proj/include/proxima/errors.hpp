#pragma once

#include <stdexcept>
#include <string>

namespace proxima {

/// Base class for all library errors.
struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Two objects from incompatible spaces (wrong dimension, bad index).
struct DimensionMismatchError : Error {
  using Error::Error;
};

/// A constructor invariant was violated (bad radius, empty set, non-metric matrix, ...).
struct InvalidArgumentError : Error {
  using Error::Error;
};

/// A feature was requested outside the supported configuration
/// (e.g. projection-based proximal resolution with a p != 2 ambient norm).
struct UnsupportedConfigError : Error {
  using Error::Error;
};

/// Malformed or inconsistent problem description.
struct ConfigError : Error {
  using Error::Error;
};

}  // namespace proxima
