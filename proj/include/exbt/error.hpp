#pragma once

#include <stdexcept>
#include <string>

namespace exbt {

/// Base of all engine errors. The subclass decides the CLI exit code.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Bad flags, malformed experiment config, invalid hyperparameters (exit 1).
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// Malformed or inconsistent input data (exit 2).
class DataError : public Error {
 public:
  using Error::Error;
};

/// Solver divergence, rank deficiency, NaN loss (exit 3).
class NumericalError : public Error {
 public:
  using Error::Error;
};

}  // namespace exbt
