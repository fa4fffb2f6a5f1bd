#pragma once

#include <stdexcept>
#include <string>

namespace pmjc {

// Argument errors use std::invalid_argument directly. The types below cover
// the failure classes callers are expected to distinguish.

/// Non-finite input to a special function.
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// An iterative method failed: series exhaustion, Newton derivative breakdown,
/// Jacobi non-convergence.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A 2x2 excitation block has Delta = 0, so the dressing angle is undefined.
/// The caller should treat the block as already diagonal (or as sitting on an
/// exceptional point, for imaginary coupling).
class DegenerateBlockError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// The integrator produced a non-finite amplitude or was misconfigured.
class IntegrationError : public std::runtime_error {
 public:
  IntegrationError(const std::string& what, double time)
      : std::runtime_error(what + " (t = " + std::to_string(time) + ")"), time_(time) {}
  double time() const noexcept { return time_; }

 private:
  double time_;
};

}  // namespace pmjc
