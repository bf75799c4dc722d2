#pragma once

#include <limits>
#include <vector>

#include "trqd/propagate.hpp"

namespace trqd {

/// Quality summary for one rescaled protocol against its reference.
/// mt_product / peak_drive_norm describe the rescaled leg; the _reference
/// fields the reference leg.  target_* compare against a scenario's
/// analytic target state where one exists (NaN otherwise).
struct ProtocolReport {
  double fidelity = 0.0;        // |<ref_final|tr_final>|^2
  double relative_phase = 0.0;  // arg<ref_final|tr_final>; NaN if undefined
  double mt_product = 0.0;
  double mt_product_reference = 0.0;
  double peak_drive_norm = 0.0;
  double peak_drive_norm_reference = 0.0;
  double integral_mismatch = 0.0;  // ||int TR - int ref||_max
  double endpoint_mismatch = 0.0;  // max of the two endpoint defects
  double unitary_mismatch = 0.0;   // ||U_ref - U_tr||_max
  double target_fidelity = std::numeric_limits<double>::quiet_NaN();
  double target_relative_phase = std::numeric_limits<double>::quiet_NaN();
};

/// |<a|b>|^2 for normalized states.
double fidelity(const StateVector& a, const StateVector& b);

/// arg<target|actual>, in (-pi, pi].  Only meaningful for nearly parallel
/// states; throws when fidelity(target, actual) <= 0.5.
double relative_phase(const StateVector& target, const StateVector& actual);

/// sqrt(<H^2> - <H>^2) on psi, clamped at zero against round-off.
double energy_uncertainty(const HermitianMatrix& hamiltonian, const StateVector& psi);

/// Time-energy product for comparison against hbar*pi/2 bounds.
double mt_product(double delta_t, double delta_e);

/// Populations |<n(t)|psi>|^2 over the instantaneous eigenbasis of H(t),
/// eigenvalues ascending.  Eigenvalues closer than 1e-9 * ||H|| are grouped
/// and their populations summed, so degenerate subspaces appear as one
/// block.
std::vector<double> instantaneous_populations(const HamiltonianSchedule& schedule, double t,
                                              const StateVector& psi);

/// Entrywise Simpson integral of H(t) over the schedule domain.
Eigen::MatrixXcd operator_integral(const HamiltonianSchedule& schedule, int n_points);

/// Max spectral norm of H(t) over n_samples uniformly spaced times
/// (endpoints included).  Use an odd n_samples to hit the midpoint.
double peak_drive_norm(const HamiltonianSchedule& schedule, int n_samples);

}  // namespace trqd
