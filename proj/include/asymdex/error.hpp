#pragma once

#include <stdexcept>
#include <string>

namespace asymdex {

/// Invalid configuration: bad task ranges, unknown enum names, malformed config files.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Mismatched vector or matrix dimensions.
class ShapeError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Non-finite numbers where finite ones are required (actions, losses, metrics).
class NumericFault : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace asymdex
