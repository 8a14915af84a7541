#pragma once

#include <stdexcept>
#include <string>

namespace dsq {

/// Coupling ratio at or beyond the critical point, where the normal-phase
/// closed forms diverge.
class SingularCouplingError : public std::domain_error {
 public:
  explicit SingularCouplingError(const std::string& msg) : std::domain_error(msg) {}
};

/// Iterative eigensolver or cutoff search exhausted its budget. Carries the
/// best residual (or last convergence estimate) seen before giving up.
class NonConvergenceError : public std::runtime_error {
 public:
  NonConvergenceError(const std::string& msg, double best_residual)
      : std::runtime_error(msg), best_residual_(best_residual) {}

  double best_residual() const noexcept { return best_residual_; }

 private:
  double best_residual_;
};

/// The fit Jacobian is rank deficient; the parameters cannot be determined
/// from the supplied points (e.g. constant data).
class UnidentifiableFitError : public std::runtime_error {
 public:
  explicit UnidentifiableFitError(const std::string& msg) : std::runtime_error(msg) {}
};

}  // namespace dsq
