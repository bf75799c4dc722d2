#include "trqd/models.hpp"

#include <cmath>
#include <stdexcept>
#include <utility>

namespace trqd {

namespace {

constexpr double kPi = 3.14159265358979323846;

Eigen::MatrixXd ladder(int dim) {
  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(dim, dim);
  for (int n = 1; n < dim; ++n) a(n - 1, n) = std::sqrt(double(n));
  return a;
}

void check_oscillator_params(const OscillatorParams& params) {
  if (params.basis_dim < 2)
    throw std::invalid_argument("oscillator: basis needs at least two Fock levels");
  if (!(params.mass > 0.0) || !(params.hbar > 0.0) || !(params.basis_frequency > 0.0))
    throw std::invalid_argument("oscillator: mass, hbar and basis_frequency must be > 0");
}

void check_domain(double t_start, double t_end) {
  if (!(t_end > t_start))
    throw std::invalid_argument("schedule: domain must have positive length");
}

}  // namespace

double hermiticity_defect(const Eigen::MatrixXcd& m) {
  return (m - m.adjoint()).cwiseAbs().maxCoeff();
}

HamiltonianSchedule::HamiltonianSchedule(int dim, double t_start, double t_end,
                                         bool commuting_family, Evaluator evaluator)
    : dim_(dim), t_start_(t_start), t_end_(t_end), commuting_(commuting_family),
      evaluator_(std::move(evaluator)) {
  if (dim_ < 1) throw std::invalid_argument("schedule: dimension must be >= 1");
  check_domain(t_start_, t_end_);
  if (!evaluator_) throw std::invalid_argument("schedule: evaluator must be set");
}

Eigen::MatrixXcd HamiltonianSchedule::operator()(double t) const {
  Eigen::MatrixXcd h = evaluator_(t);
  if (h.rows() != dim_ || h.cols() != dim_)
    throw std::runtime_error("schedule: evaluator returned a matrix of wrong dimension");
  return h;
}

Eigen::MatrixXcd schedule_integral(const HamiltonianSchedule& schedule, int n_points) {
  if (n_points < 3 || n_points % 2 == 0)
    throw std::invalid_argument("schedule_integral: n_points must be odd and >= 3");
  const double h = schedule.duration() / double(n_points - 1);
  Eigen::MatrixXcd acc = schedule(schedule.t_start());
  acc += schedule(schedule.t_end());
  for (int i = 1; i < n_points - 1; ++i) {
    const double w = (i % 2 == 1) ? 4.0 : 2.0;
    acc += w * schedule(schedule.t_start() + h * double(i));
  }
  return (h / 3.0) * acc;
}

FockOperators fock_operators(const OscillatorParams& params) {
  check_oscillator_params(params);
  const int n = params.basis_dim;
  // Build two levels larger, form products, then crop: the kept blocks of
  // x^2 and p^2 are then the exact truncations of the full operators.
  const int padded = n + 2;
  const Eigen::MatrixXd a = ladder(padded);
  const Eigen::MatrixXd plus = a + a.transpose();
  const Eigen::MatrixXd minus = a.transpose() - a;
  const double xs = std::sqrt(params.hbar / (2.0 * params.mass * params.basis_frequency));
  const double ps = std::sqrt(params.hbar * params.mass * params.basis_frequency / 2.0);

  FockOperators ops;
  const std::complex<double> i_unit(0.0, 1.0);
  ops.x = (xs * plus.topLeftCorner(n, n)).cast<std::complex<double>>();
  ops.p = (i_unit * ps) * minus.topLeftCorner(n, n).cast<std::complex<double>>();
  ops.x2 = (xs * xs * (plus * plus).topLeftCorner(n, n)).cast<std::complex<double>>();
  ops.p2 = (-ps * ps * (minus * minus).topLeftCorner(n, n)).cast<std::complex<double>>();
  return ops;
}

HamiltonianSchedule spin_schedule(const SpinParams& params,
                                  std::function<Eigen::Vector3d(double)> field,
                                  double t_start, double t_end) {
  if (params.gamma == 0.0)
    throw std::invalid_argument("spin: gyromagnetic ratio must be nonzero");
  if (!(params.hbar > 0.0))
    throw std::invalid_argument("spin: hbar must be > 0");
  if (!field) throw std::invalid_argument("spin: field must be evaluable");
  check_domain(t_start, t_end);

  // Commuting iff all sampled field values are collinear.
  const int probes = 33;
  std::vector<Eigen::Vector3d> samples;
  samples.reserve(probes);
  double bmax = 0.0;
  for (int i = 0; i < probes; ++i) {
    const double t = t_start + (t_end - t_start) * double(i) / double(probes - 1);
    samples.push_back(field(t));
    bmax = std::max(bmax, samples.back().norm());
  }
  bool commuting = true;
  Eigen::Vector3d axis = Eigen::Vector3d::Zero();
  for (const auto& b : samples) {
    if (b.norm() <= 1e-12 * bmax) continue;
    if (axis.isZero()) {
      axis = b.normalized();
    } else if (axis.cross(b.normalized()).norm() > 1e-12) {
      commuting = false;
      break;
    }
  }

  const double half = 0.5 * params.hbar * params.gamma;
  auto eval = [half, field](double t) {
    const Eigen::Vector3d b = field(t);
    Eigen::MatrixXcd h(2, 2);
    h(0, 0) = half * b.z();
    h(1, 1) = -half * b.z();
    h(0, 1) = half * std::complex<double>(b.x(), -b.y());
    h(1, 0) = half * std::complex<double>(b.x(), b.y());
    return h;
  };
  return HamiltonianSchedule(2, t_start, t_end, commuting, std::move(eval));
}

HamiltonianSchedule oscillator_schedule(const OscillatorParams& params,
                                        std::function<double(double)> kinetic_scale,
                                        std::function<double(double)> omega,
                                        double t_start, double t_end) {
  check_domain(t_start, t_end);
  if (!kinetic_scale || !omega)
    throw std::invalid_argument("oscillator: kinetic_scale and omega must be evaluable");
  FockOperators ops = fock_operators(params);
  const double inv_2m = 0.5 / params.mass;
  const double half_m = 0.5 * params.mass;
  auto eval = [p2 = ops.p2, x2 = ops.x2, inv_2m, half_m, kinetic_scale, omega](double t) {
    const double w = omega(t);
    return Eigen::MatrixXcd((kinetic_scale(t) * inv_2m) * p2 + (half_m * w * w) * x2);
  };
  return HamiltonianSchedule(params.basis_dim, t_start, t_end, false, std::move(eval));
}

HamiltonianSchedule transport_schedule(const OscillatorParams& params,
                                       std::function<double(double)> kinetic_scale,
                                       std::function<double(double)> omega,
                                       std::function<double(double)> trap_center,
                                       double t_start, double t_end) {
  check_domain(t_start, t_end);
  if (!kinetic_scale || !omega || !trap_center)
    throw std::invalid_argument("transport: all schedule callables must be evaluable");
  FockOperators ops = fock_operators(params);
  const int n = params.basis_dim;
  const double inv_2m = 0.5 / params.mass;
  const double half_m = 0.5 * params.mass;
  const Eigen::MatrixXcd id = Eigen::MatrixXcd::Identity(n, n);
  auto eval = [p2 = ops.p2, x2 = ops.x2, x = ops.x, id, inv_2m, half_m, kinetic_scale,
               omega, trap_center](double t) {
    const double w = omega(t);
    const double x0 = trap_center(t);
    // (x - x0)^2 expanded over the fixed Fock matrices
    return Eigen::MatrixXcd((kinetic_scale(t) * inv_2m) * p2 +
                            (half_m * w * w) * (x2 - (2.0 * x0) * x + (x0 * x0) * id));
  };
  return HamiltonianSchedule(params.basis_dim, t_start, t_end, false, std::move(eval));
}

HamiltonianSchedule time_rescale(const HamiltonianSchedule& reference,
                                 const RescalingSpec& spec) {
  eval_f(spec, 0.0);  // validates the rescaling parameters
  const double scale = std::max(1.0, spec.t_f);
  if (std::abs(reference.t_start()) > 1e-9 * scale ||
      std::abs(reference.t_end() - spec.t_f) > 1e-9 * scale)
    throw std::invalid_argument(
        "time_rescale: reference domain must be [0, t_f] of the rescaling spec");
  auto eval = [reference, spec](double tau) {
    return Eigen::MatrixXcd(eval_f_prime(spec, tau) * reference(eval_f(spec, tau)));
  };
  return HamiltonianSchedule(reference.dim(), 0.0, spec.tau_final(),
                             reference.commuting_family(), std::move(eval));
}

double compression_frequency(double omega0, double omega_f, double t_f, double t) {
  if (!(omega0 > 0.0) || !(omega_f > 0.0))
    throw std::invalid_argument("compression: frequencies must be > 0");
  if (!(t_f > 0.0)) throw std::invalid_argument("compression: t_f must be > 0");
  const double slack = 1e-9 * std::max(1.0, t_f);
  if (t < -slack || t > t_f + slack)
    throw std::domain_error("compression: time outside [0, t_f]");
  const double s = std::sin(kPi * t / (2.0 * t_f));
  return omega0 + (omega_f - omega0) * s * s;
}

double tr_frequency(double omega0, double omega_f, const RescalingSpec& spec, double tau) {
  const double horizon = spec.tau_final();
  const double slack = 1e-9 * std::max(1.0, horizon);
  if (tau < -slack || tau > horizon + slack)
    throw std::domain_error("tr_frequency: time outside [0, t_f/a]");
  return std::sqrt(eval_f_prime(spec, tau)) *
         compression_frequency(omega0, omega_f, spec.t_f, eval_f(spec, tau));
}

}  // namespace trqd
