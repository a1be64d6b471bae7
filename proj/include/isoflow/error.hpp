#pragma once

#include <stdexcept>
#include <string>

namespace isoflow {

/// Invalid construction parameters or inconsistent inputs.
class ValidationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Scenario file problems. Carries the offending line when known (0 otherwise).
class ConfigError : public std::runtime_error {
 public:
  explicit ConfigError(const std::string& what, int line = 0)
      : std::runtime_error(line > 0 ? "line " + std::to_string(line) + ": " + what : what),
        line_(line) {}
  int line() const noexcept { return line_; }

 private:
  int line_;
};

/// Non-finite values or a violated stability bound during time stepping.
class NumericalAbort : public std::runtime_error {
 public:
  explicit NumericalAbort(const std::string& what, long step = -1)
      : std::runtime_error(step >= 0 ? what + " (step " + std::to_string(step) + ")" : what),
        step_(step) {}
  long step() const noexcept { return step_; }

 private:
  long step_;
};

}  // namespace isoflow
