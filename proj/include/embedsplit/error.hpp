#pragma once

#include <stdexcept>
#include <string>

namespace embedsplit {

/// Base class for all errors raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Raised when a state becomes non-finite or a flow rejects its input
/// during time stepping. `step` is the step index within the run (or -1
/// for a standalone step), `stage` the flow index within the step.
class IntegrationError : public Error {
 public:
  IntegrationError(const std::string& what, long step, int stage)
      : Error(what), step_(step), stage_(stage) {}

  long step() const noexcept { return step_; }
  int stage() const noexcept { return stage_; }

 private:
  long step_;
  int stage_;
};

}  // namespace embedsplit
