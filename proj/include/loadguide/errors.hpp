#pragma once

#include <stdexcept>
#include <string>

namespace loadguide {

// Shape contract violated (matrix sizes, window geometry, model config vs input).
class DimensionError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Non-finite values or other numeric failures during compute.
class NumericError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Bad input data: parse failures, empty series, duplicate timestamps.
class DataError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Invalid configuration values.
class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

}  // namespace loadguide
