#pragma once

#include <stdexcept>

namespace regloc {

/// Invalid input: malformed geometry, bad parameters, unreadable scenario.
class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A computation that could not produce a trustworthy number.
class NumericError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace regloc
