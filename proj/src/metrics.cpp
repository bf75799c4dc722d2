#include "trqd/metrics.hpp"

#include <Eigen/Eigenvalues>
#include <cmath>
#include <stdexcept>

namespace trqd {

namespace {

void check_same_dim(const StateVector& a, const StateVector& b) {
  if (a.size() != b.size())
    throw std::invalid_argument("metrics: state dimensions do not match");
}

}  // namespace

double fidelity(const StateVector& a, const StateVector& b) {
  check_same_dim(a, b);
  return std::norm(a.dot(b));
}

double relative_phase(const StateVector& target, const StateVector& actual) {
  check_same_dim(target, actual);
  const std::complex<double> overlap = target.dot(actual);
  if (std::norm(overlap) <= 0.5)
    throw std::runtime_error(
        "metrics: relative phase undefined for nearly orthogonal states");
  return std::arg(overlap);
}

double energy_uncertainty(const HermitianMatrix& hamiltonian, const StateVector& psi) {
  if (hamiltonian.rows() != psi.size() || hamiltonian.cols() != psi.size())
    throw std::invalid_argument("metrics: operator/state dimensions do not match");
  const StateVector h_psi = hamiltonian * psi;
  const double mean = psi.dot(h_psi).real();
  const double second_moment = h_psi.squaredNorm();
  return std::sqrt(std::max(0.0, second_moment - mean * mean));
}

double mt_product(double delta_t, double delta_e) {
  if (delta_t < 0.0 || delta_e < 0.0)
    throw std::invalid_argument("metrics: mt_product arguments must be >= 0");
  return delta_t * delta_e;
}

std::vector<double> instantaneous_populations(const HamiltonianSchedule& schedule, double t,
                                              const StateVector& psi) {
  if (psi.size() != schedule.dim())
    throw std::invalid_argument("metrics: state dimension does not match schedule");
  const Eigen::MatrixXcd h = schedule(t);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(h);
  if (es.info() != Eigen::Success)
    throw std::runtime_error("metrics: eigensolver failed");
  const Eigen::VectorXd& evals = es.eigenvalues();  // ascending
  const int n = schedule.dim();
  const double norm = std::max(std::abs(evals(0)), std::abs(evals(n - 1)));
  const double gap_tol = 1e-9 * norm;

  const Eigen::VectorXcd amps = es.eigenvectors().adjoint() * psi;
  std::vector<double> populations;
  double block = std::norm(amps(0));
  for (int i = 1; i < n; ++i) {
    if (evals(i) - evals(i - 1) <= gap_tol) {
      block += std::norm(amps(i));
    } else {
      populations.push_back(block);
      block = std::norm(amps(i));
    }
  }
  populations.push_back(block);
  return populations;
}

Eigen::MatrixXcd operator_integral(const HamiltonianSchedule& schedule, int n_points) {
  return schedule_integral(schedule, n_points);
}

double peak_drive_norm(const HamiltonianSchedule& schedule, int n_samples) {
  if (n_samples < 2)
    throw std::invalid_argument("metrics: peak_drive_norm needs at least two samples");
  double peak = 0.0;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es;
  for (int i = 0; i < n_samples; ++i) {
    const double t =
        schedule.t_start() + schedule.duration() * double(i) / double(n_samples - 1);
    es.compute(schedule(t), Eigen::EigenvaluesOnly);
    if (es.info() != Eigen::Success)
      throw std::runtime_error("metrics: eigensolver failed");
    const Eigen::VectorXd& evals = es.eigenvalues();
    peak = std::max({peak, std::abs(evals(0)), std::abs(evals(evals.size() - 1))});
  }
  return peak;
}

}  // namespace trqd
