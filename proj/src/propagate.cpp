#include "trqd/propagate.hpp"

#include <Eigen/Eigenvalues>
#include <cmath>
#include <sstream>
#include <stdexcept>

namespace trqd {

namespace {

void check_hermitian(const Eigen::MatrixXcd& h) {
  const double scale = h.cwiseAbs().maxCoeff();
  if (hermiticity_defect(h) > 1e-12 * std::max(scale, 1e-30))
    throw std::runtime_error("propagate: schedule evaluation is not Hermitian");
}

bool effectively_real(const Eigen::MatrixXcd& h) {
  const double scale = h.cwiseAbs().maxCoeff();
  return h.imag().cwiseAbs().maxCoeff() <= 1e-14 * std::max(scale, 1e-30);
}

double unitarity_defect_of(const Eigen::MatrixXcd& u) {
  const int n = u.rows();
  return (u.adjoint() * u - Eigen::MatrixXcd::Identity(n, n)).cwiseAbs().maxCoeff();
}

// Step indices (0..n_steps) at which the trajectory is recorded.
std::vector<long> sample_steps(long n_steps, int samples) {
  std::vector<long> idx;
  idx.reserve(samples);
  for (int j = 0; j < samples; ++j) {
    const long k = std::lround(double(j) * double(n_steps) / double(samples - 1));
    if (idx.empty() || k > idx.back()) idx.push_back(k);
  }
  return idx;
}

// Eigenvector round-off leaks ~1e-14 of unitarity defect per factor, which
// accumulates linearly over long runs.  One Newton-Schulz iteration
// U <- U (3I - U^dag U) / 2 every kPolishInterval steps holds the product
// near the unitary manifold at negligible amortized cost.
constexpr long kPolishInterval = 2000;

void polish_unitary(Eigen::MatrixXd& ur, Eigen::MatrixXd& ui) {
  Eigen::MatrixXd mr = -(ur.transpose() * ur + ui.transpose() * ui);
  mr.diagonal().array() += 3.0;
  const Eigen::MatrixXd mi = ui.transpose() * ur - ur.transpose() * ui;
  const Eigen::MatrixXd new_r = 0.5 * (ur * mr - ui * mi);
  const Eigen::MatrixXd new_i = 0.5 * (ur * mi + ui * mr);
  ur = new_r;
  ui = new_i;
}

}  // namespace

Eigen::MatrixXcd hermitian_phase_exp(const Eigen::MatrixXcd& h, double factor) {
  check_hermitian(h);
  if (effectively_real(h)) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(h.real());
    if (es.info() != Eigen::Success)
      throw std::runtime_error("propagate: eigensolver failed");
    const Eigen::VectorXcd phases =
        (std::complex<double>(0.0, -factor) * es.eigenvalues().array()).exp();
    const Eigen::MatrixXcd v = es.eigenvectors().cast<std::complex<double>>();
    return v * phases.asDiagonal() * v.adjoint();
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(h);
  if (es.info() != Eigen::Success)
    throw std::runtime_error("propagate: eigensolver failed");
  const Eigen::VectorXcd phases =
      (std::complex<double>(0.0, -factor) * es.eigenvalues().array()).exp();
  return es.eigenvectors() * phases.asDiagonal() * es.eigenvectors().adjoint();
}

PropagationResult propagate_ordered(const HamiltonianSchedule& schedule, long n_steps,
                                    double hbar, const std::optional<StateVector>& initial,
                                    int trajectory_samples) {
  if (n_steps < 1) throw std::invalid_argument("propagate: n_steps must be >= 1");
  if (!(hbar > 0.0)) throw std::invalid_argument("propagate: hbar must be > 0");
  const int n = schedule.dim();
  if (initial && initial->size() != n)
    throw std::invalid_argument("propagate: initial state dimension mismatch");
  if (trajectory_samples != 0 && (trajectory_samples < 2 || !initial))
    throw std::invalid_argument(
        "propagate: trajectory recording needs an initial state and >= 2 samples");

  const double t0 = schedule.t_start();
  const double dt = schedule.duration() / double(n_steps);

  // U is held as real and imaginary parts; schedules that evaluate to real
  // symmetric matrices (the oscillator models) then only ever need real
  // eigensolves and real GEMMs.
  Eigen::MatrixXd ur = Eigen::MatrixXd::Identity(n, n);
  Eigen::MatrixXd ui = Eigen::MatrixXd::Zero(n, n);
  Eigen::MatrixXd wr(n, n), wi(n, n);
  Eigen::VectorXd sr, si, tr_, ti;
  Eigen::VectorXcd psi;

  PropagationResult result;
  std::vector<long> record;
  std::size_t next_record = 0;
  if (initial) {
    psi = *initial;
    if (trajectory_samples >= 2) {
      record = sample_steps(n_steps, std::min<long>(trajectory_samples, n_steps + 1));
      result.trajectory.reserve(record.size());
      if (record.front() == 0) {
        result.trajectory.push_back({t0, psi});
        next_record = 1;
      }
    }
  }

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es_real;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es_cplx;

  for (long k = 0; k < n_steps; ++k) {
    const double t_mid = t0 + (double(k) + 0.5) * dt;
    const Eigen::MatrixXcd h = schedule(t_mid);
    check_hermitian(h);

    if (effectively_real(h)) {
      es_real.compute(h.real());
      if (es_real.info() != Eigen::Success)
        throw std::runtime_error("propagate: eigensolver failed");
      const Eigen::MatrixXd& v = es_real.eigenvectors();
      const Eigen::ArrayXd theta = (-dt / hbar) * es_real.eigenvalues().array();
      const Eigen::ArrayXd c = theta.cos();
      const Eigen::ArrayXd s = theta.sin();

      wr.noalias() = v.transpose() * ur;
      wi.noalias() = v.transpose() * ui;
      for (int i = 0; i < n; ++i) {
        const double ci = c(i), si_ = s(i);
        for (int j = 0; j < n; ++j) {
          const double a = wr(i, j), b = wi(i, j);
          wr(i, j) = ci * a - si_ * b;
          wi(i, j) = ci * b + si_ * a;
        }
      }
      ur.noalias() = v * wr;
      ui.noalias() = v * wi;

      if (initial) {
        sr.noalias() = v.transpose() * psi.real();
        si.noalias() = v.transpose() * psi.imag();
        for (int i = 0; i < n; ++i) {
          const double a = sr(i), b = si(i);
          sr(i) = c(i) * a - s(i) * b;
          si(i) = c(i) * b + s(i) * a;
        }
        tr_.noalias() = v * sr;
        ti.noalias() = v * si;
        for (int i = 0; i < n; ++i) psi(i) = std::complex<double>(tr_(i), ti(i));
      }
    } else {
      es_cplx.compute(h);
      if (es_cplx.info() != Eigen::Success)
        throw std::runtime_error("propagate: eigensolver failed");
      const Eigen::VectorXcd phases =
          (std::complex<double>(0.0, -dt / hbar) * es_cplx.eigenvalues().array()).exp();
      const Eigen::MatrixXcd& v = es_cplx.eigenvectors();
      Eigen::MatrixXcd u(n, n);
      u.real() = ur;
      u.imag() = ui;
      u = v * (phases.asDiagonal() * (v.adjoint() * u).eval());
      ur = u.real();
      ui = u.imag();
      if (initial) psi = v * (phases.asDiagonal() * (v.adjoint() * psi).eval());
    }

    if ((k + 1) % kPolishInterval == 0 && k + 1 < n_steps) {
      polish_unitary(ur, ui);
      if (initial) psi /= psi.norm();
    }

    if (initial && next_record < record.size() && record[next_record] == k + 1) {
      const double t = (k + 1 == n_steps) ? schedule.t_end() : t0 + double(k + 1) * dt;
      result.trajectory.push_back({t, psi});
      ++next_record;
    }
  }

  result.final_unitary.resize(n, n);
  result.final_unitary.real() = ur;
  result.final_unitary.imag() = ui;
  result.unitarity_defect = unitarity_defect_of(result.final_unitary);
  result.steps_used = n_steps;
  if (initial) result.final_state = psi;
  return result;
}

PropagationResult propagate_commuting(const HamiltonianSchedule& schedule, int quadrature_points,
                                      double hbar, const std::optional<StateVector>& initial,
                                      int trajectory_samples) {
  if (!schedule.commuting_family())
    throw std::logic_error("propagate_commuting: schedule is not declared commuting");
  if (!(hbar > 0.0)) throw std::invalid_argument("propagate: hbar must be > 0");
  if (quadrature_points < 3 || quadrature_points % 2 == 0)
    throw std::invalid_argument("propagate_commuting: quadrature_points must be odd and >= 3");
  const int n = schedule.dim();
  if (initial && initial->size() != n)
    throw std::invalid_argument("propagate: initial state dimension mismatch");
  if (trajectory_samples != 0 && (trajectory_samples < 2 || !initial))
    throw std::invalid_argument(
        "propagate: trajectory recording needs an initial state and >= 2 samples");

  const Eigen::MatrixXcd integral = schedule_integral(schedule, quadrature_points);
  PropagationResult result;
  result.final_unitary = hermitian_phase_exp(integral, 1.0 / hbar);
  result.unitarity_defect = unitarity_defect_of(result.final_unitary);
  result.steps_used = quadrature_points;
  if (initial) {
    result.final_state = result.final_unitary * (*initial);
    if (trajectory_samples >= 2) {
      // Cumulative phase integrals; each sample is a fresh exponential, so
      // intermediate states are exact for a genuinely commuting family up
      // to quadrature error.
      const double t0 = schedule.t_start();
      const double span = schedule.duration() / double(trajectory_samples - 1);
      int seg_points = quadrature_points / (trajectory_samples - 1);
      if (seg_points < 3) seg_points = 3;
      if (seg_points % 2 == 0) ++seg_points;
      Eigen::MatrixXcd acc = Eigen::MatrixXcd::Zero(n, n);
      result.trajectory.reserve(trajectory_samples);
      result.trajectory.push_back({t0, *initial});
      for (int j = 1; j < trajectory_samples; ++j) {
        const double seg_start = t0 + span * double(j - 1);
        const double seg_end = (j == trajectory_samples - 1) ? schedule.t_end()
                                                             : t0 + span * double(j);
        HamiltonianSchedule segment(n, seg_start, seg_end, true,
                                    [&schedule](double t) { return schedule(t); });
        acc += schedule_integral(segment, seg_points);
        if (j == trajectory_samples - 1) {
          result.trajectory.push_back({seg_end, result.final_state});
        } else {
          result.trajectory.push_back(
              {seg_end, hermitian_phase_exp(acc, 1.0 / hbar) * (*initial)});
        }
      }
    }
  }
  return result;
}

PropagationResult converge(const HamiltonianSchedule& schedule, double target_tol,
                           long max_steps, double hbar, long n_start,
                           const std::optional<StateVector>& initial, int trajectory_samples) {
  if (!(target_tol > 0.0)) throw std::invalid_argument("converge: target_tol must be > 0");
  if (n_start < 1) throw std::invalid_argument("converge: n_start must be >= 1");
  if (max_steps < 2 * n_start)
    throw std::invalid_argument("converge: max_steps must allow at least one doubling");

  PropagationResult prev = propagate_ordered(schedule, n_start, hbar, initial, trajectory_samples);
  double diff = std::numeric_limits<double>::infinity();
  for (long n = 2 * n_start; n <= max_steps; n *= 2) {
    PropagationResult cur = propagate_ordered(schedule, n, hbar, initial, trajectory_samples);
    diff = (cur.final_unitary - prev.final_unitary).cwiseAbs().maxCoeff();
    if (diff < target_tol) {
      cur.refine_diff = diff;
      return cur;
    }
    prev = std::move(cur);
  }
  std::ostringstream msg;
  msg << "converge: step doubling reached " << prev.steps_used << " steps with difference "
      << diff << " above tolerance " << target_tol;
  throw ConvergenceError(msg.str(), diff);
}

}  // namespace trqd
