#pragma once

#include <stdexcept>
#include <string>

namespace ensmhd {

/// Precondition violation on an argument (bad size, bad count, bad parameter).
class InvalidArgument : public std::invalid_argument {
public:
  using std::invalid_argument::invalid_argument;
};

/// Inconsistent problem setup: missing boundary data, incompatible element
/// family, malformed config file.
class ConfigError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// Sparse factorization could not be completed (singular or structurally
/// singular matrix).
class FactorizationError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// Non-finite values appeared in a timestep solution.
class DivergenceError : public std::runtime_error {
public:
  DivergenceError(int step, const std::string& what)
      : std::runtime_error("step " + std::to_string(step) + ": " + what), step_(step) {}
  int step() const noexcept { return step_; }

private:
  int step_;
};

}  // namespace ensmhd
