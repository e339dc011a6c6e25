#pragma once

#include <stdexcept>
#include <string>

namespace dialectoscope {

// Each error family maps onto one CLI exit code (see tools/dialectoscope.cpp).
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
  virtual int exit_code() const noexcept { return 1; }
};

/// Invalid configuration, bad arguments, missing input paths.
class ConfigError : public Error {
 public:
  using Error::Error;
  int exit_code() const noexcept override { return 2; }
};

/// The data cannot support the request: empty vocabulary, degenerate
/// directions, unknown tokens, malformed files.
class DataError : public Error {
 public:
  using Error::Error;
  int exit_code() const noexcept override { return 3; }
};

/// Numerical failure: divergence, failed decompositions.
class NumericError : public Error {
 public:
  using Error::Error;
  int exit_code() const noexcept override { return 4; }
};

class IoError : public ConfigError {
 public:
  using ConfigError::ConfigError;
};

}  // namespace dialectoscope
