#pragma once

#include <optional>
#include <vector>

#include "trqd/models.hpp"

namespace trqd {

using StateVector = Eigen::VectorXcd;

struct TrajectorySample {
  double t;
  StateVector state;
};

struct PropagationResult {
  Eigen::MatrixXcd final_unitary;
  double unitarity_defect = 0.0;  // ||U^dag U - I||_max
  long steps_used = 0;
  // ||U_2n - U_n||_max from the last doubling when produced by converge();
  // NaN otherwise.
  double refine_diff = std::numeric_limits<double>::quiet_NaN();
  StateVector final_state;  // empty unless an initial state was supplied
  std::vector<TrajectorySample> trajectory;
};

/// exp(-i * factor * h) for Hermitian h, by eigendecomposition, so the
/// result is unitary up to eigensolver error.
Eigen::MatrixXcd hermitian_phase_exp(const Eigen::MatrixXcd& h, double factor);

/// Time-ordered propagation over uniform steps: U is the right-to-left
/// product of exp(-i dt H(t_mid)/hbar) factors (midpoint rule, globally
/// second order).  Every factor is computed by Hermitian eigendecomposition
/// and is therefore exactly unitary up to eigensolver error.
///
/// If an initial state is given it is propagated alongside and recorded at
/// trajectory_samples uniformly spaced step boundaries (0 disables
/// recording; otherwise at least 2 samples, clamped to n_steps + 1).
PropagationResult propagate_ordered(const HamiltonianSchedule& schedule, long n_steps,
                                    double hbar = 1.0,
                                    const std::optional<StateVector>& initial = std::nullopt,
                                    int trajectory_samples = 0);

/// Single-exponential propagation U = exp(-(i/hbar) \int H dt) for
/// schedules whose values commute at all times.  The integral uses
/// composite Simpson quadrature with quadrature_points (odd, >= 3).
/// Serves as an oracle for propagate_ordered on commuting families.
PropagationResult propagate_commuting(const HamiltonianSchedule& schedule, int quadrature_points,
                                      double hbar = 1.0,
                                      const std::optional<StateVector>& initial = std::nullopt,
                                      int trajectory_samples = 0);

/// Runs propagate_ordered with doubling step counts starting from n_start
/// until consecutive unitaries agree to target_tol in max norm, or throws
/// ConvergenceError (carrying the last difference) once the next doubling
/// would exceed max_steps.  Returns the finest result with its achieved
/// difference in refine_diff.
PropagationResult converge(const HamiltonianSchedule& schedule, double target_tol,
                           long max_steps, double hbar = 1.0, long n_start = 64,
                           const std::optional<StateVector>& initial = std::nullopt,
                           int trajectory_samples = 0);

}  // namespace trqd
