#pragma once

#include <stdexcept>

namespace robust_oco {

/// Malformed arguments: dimension mismatch, nonpositive constants, out-of-range counts.
class InputError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Configuration values that are individually valid but inconsistent with each other.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// An operation invoked in a mode it does not support.
class UsageError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

}  // namespace robust_oco
