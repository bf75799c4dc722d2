#pragma once

#include <stdexcept>
#include <string>

namespace trqd {

/// Thrown when an iterative numerical routine runs out of iterations or
/// steps before reaching its tolerance.  Carries the last residual so the
/// caller can report how far off the result was.
class ConvergenceError : public std::runtime_error {
public:
  ConvergenceError(const std::string& what, double residual)
      : std::runtime_error(what), residual_(residual) {}

  double residual() const { return residual_; }

private:
  double residual_;
};

}  // namespace trqd
