#pragma once

#include <Eigen/Dense>
#include <functional>

#include "trqd/rescale.hpp"

namespace trqd {

using HermitianMatrix = Eigen::MatrixXcd;

/// Max-norm hermiticity defect, ||H - H^dag||_max.
double hermiticity_defect(const Eigen::MatrixXcd& m);

/// A time-dependent Hamiltonian as an evaluable matrix family on a fixed
/// domain.  Immutable after construction; evaluation is pure, so schedules
/// may be shared freely between threads.
///
/// commuting_family is declared by the constructor and means that the
/// matrices at any two times commute, which permits the single-exponential
/// propagator.
class HamiltonianSchedule {
public:
  using Evaluator = std::function<Eigen::MatrixXcd(double)>;

  HamiltonianSchedule(int dim, double t_start, double t_end,
                      bool commuting_family, Evaluator evaluator);

  int dim() const { return dim_; }
  double t_start() const { return t_start_; }
  double t_end() const { return t_end_; }
  double duration() const { return t_end_ - t_start_; }
  bool commuting_family() const { return commuting_; }

  Eigen::MatrixXcd operator()(double t) const;

private:
  int dim_;
  double t_start_;
  double t_end_;
  bool commuting_;
  Evaluator evaluator_;
};

/// Entrywise composite-Simpson integral of the schedule over its domain.
/// n_points must be odd and >= 3.
Eigen::MatrixXcd schedule_integral(const HamiltonianSchedule& schedule, int n_points);

struct OscillatorParams {
  double mass = 1.0;
  double hbar = 1.0;
  int basis_dim = 2;             // number of Fock levels kept
  double basis_frequency = 1.0;  // frequency fixing the matrix representation
};

struct SpinParams {
  double gamma = 1.0;  // gyromagnetic ratio, nonzero
  double hbar = 1.0;
};

/// Position/momentum operators (and their squares) in the truncated Fock
/// basis at the fixed basis frequency.  Products are formed at dimension
/// basis_dim + 2 and then cropped, so the kept blocks of x^2 and p^2 are
/// the exact truncations; the commutator [x, p] = i*hbar on the top-left
/// (basis_dim - 1) block, with truncation corrupting only the last
/// row/column.
struct FockOperators {
  Eigen::MatrixXcd x;
  Eigen::MatrixXcd p;
  Eigen::MatrixXcd x2;
  Eigen::MatrixXcd p2;
};

FockOperators fock_operators(const OscillatorParams& params);

/// H(t) = gamma B(t) . S for a spin-1/2, as a 2x2 matrix in the S_z
/// eigenbasis {|+>, |->}.  The schedule is declared commuting when the
/// sampled field direction is constant over the domain (collinearity is
/// probed on a fixed grid of sample times, not proven).
HamiltonianSchedule spin_schedule(const SpinParams& params,
                                  std::function<Eigen::Vector3d(double)> field,
                                  double t_start, double t_end);

/// H(t) = kinetic_scale(t) p^2/2m + (1/2) m omega(t)^2 x^2 on the truncated
/// Fock basis.  kinetic_scale and omega must stay positive on the domain.
HamiltonianSchedule oscillator_schedule(const OscillatorParams& params,
                                        std::function<double(double)> kinetic_scale,
                                        std::function<double(double)> omega,
                                        double t_start, double t_end);

/// H(t) = kinetic_scale(t) p^2/2m + (1/2) m omega(t)^2 (x - x0(t))^2, the
/// moving-trap Hamiltonian, expanded over the fixed Fock matrices.
HamiltonianSchedule transport_schedule(const OscillatorParams& params,
                                       std::function<double(double)> kinetic_scale,
                                       std::function<double(double)> omega,
                                       std::function<double(double)> trap_center,
                                       double t_start, double t_end);

/// The generic time-rescaling transform: given a reference schedule H on
/// [0, t_f], returns the schedule tau -> f'(tau) H(f(tau)) on [0, t_f/a].
/// Endpoint Hamiltonians match the reference ones exactly for the built-in
/// families; the commuting flag is preserved.
HamiltonianSchedule time_rescale(const HamiltonianSchedule& reference,
                                 const RescalingSpec& spec);

/// Reference compression ramp omega(t) = omega0 + (omega_f - omega0)
/// sin^2(pi t / 2 t_f); flat (zero slope) at both ends.
double compression_frequency(double omega0, double omega_f, double t_f, double t);

/// Rescaled compression frequency sqrt(f'(tau)) * omega(f(tau)).
double tr_frequency(double omega0, double omega_f, const RescalingSpec& spec, double tau);

}  // namespace trqd
