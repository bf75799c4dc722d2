#include "trqd/rescale.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

namespace trqd {

namespace {

constexpr double kPi = 3.14159265358979323846;

void check_spec(const RescalingSpec& spec) {
  if (!(spec.a > 0.0))
    throw std::invalid_argument("rescaling: contraction parameter a must be > 0");
  if (!(spec.t_f > 0.0))
    throw std::invalid_argument("rescaling: reference duration t_f must be > 0");
  if (spec.family == RescalingFamily::Custom && (!spec.custom_f || !spec.custom_f_prime))
    throw std::invalid_argument("rescaling: custom family needs both f and f' callables");
}

}  // namespace

std::string to_string(RescalingFamily family) {
  switch (family) {
    case RescalingFamily::Sinusoidal: return "sinusoidal";
    case RescalingFamily::Polynomial: return "polynomial";
    case RescalingFamily::Custom: return "custom";
  }
  return "unknown";
}

RescalingFamily rescaling_family_from_string(const std::string& name) {
  if (name == "sinusoidal" || name == "sin") return RescalingFamily::Sinusoidal;
  if (name == "polynomial" || name == "poly") return RescalingFamily::Polynomial;
  if (name == "custom") return RescalingFamily::Custom;
  throw std::invalid_argument("unknown rescaling family '" + name + "'");
}

RescalingSpec make_rescaling(RescalingFamily family, double a, double t_f) {
  RescalingSpec spec;
  spec.family = family;
  spec.a = a;
  spec.t_f = t_f;
  check_spec(spec);
  return spec;
}

RescalingSpec make_custom_rescaling(std::function<double(double)> f,
                                    std::function<double(double)> f_prime,
                                    double a, double t_f) {
  RescalingSpec spec;
  spec.family = RescalingFamily::Custom;
  spec.a = a;
  spec.t_f = t_f;
  spec.custom_f = std::move(f);
  spec.custom_f_prime = std::move(f_prime);
  check_spec(spec);
  return spec;
}

double eval_f(const RescalingSpec& spec, double tau) {
  check_spec(spec);
  switch (spec.family) {
    case RescalingFamily::Sinusoidal: {
      const double w = 2.0 * kPi * spec.a / spec.t_f;
      return spec.a * tau -
             spec.t_f / (2.0 * kPi * spec.a) * (spec.a - 1.0) * std::sin(w * tau);
    }
    case RescalingFamily::Polynomial: {
      const double a2 = spec.a * spec.a;
      const double c3 = 2.0 * (a2 - a2 * spec.a) / (spec.t_f * spec.t_f);
      const double c2 = 3.0 * (a2 - spec.a) / spec.t_f;
      return ((c3 * tau + c2) * tau + 1.0) * tau;
    }
    case RescalingFamily::Custom:
      return spec.custom_f(tau);
  }
  throw std::logic_error("unreachable rescaling family");
}

double eval_f_prime(const RescalingSpec& spec, double tau) {
  check_spec(spec);
  switch (spec.family) {
    case RescalingFamily::Sinusoidal: {
      const double w = 2.0 * kPi * spec.a / spec.t_f;
      return spec.a - (spec.a - 1.0) * std::cos(w * tau);
    }
    case RescalingFamily::Polynomial: {
      const double a2 = spec.a * spec.a;
      const double c3 = 2.0 * (a2 - a2 * spec.a) / (spec.t_f * spec.t_f);
      const double c2 = 3.0 * (a2 - spec.a) / spec.t_f;
      return (3.0 * c3 * tau + 2.0 * c2) * tau + 1.0;
    }
    case RescalingFamily::Custom:
      return spec.custom_f_prime(tau);
  }
  throw std::logic_error("unreachable rescaling family");
}

double invert_f(const RescalingSpec& spec, double t, double tol) {
  check_spec(spec);
  if (!(tol > 0.0))
    throw std::invalid_argument("rescaling: inversion tolerance must be > 0");
  const double scale = std::max(1.0, spec.t_f);
  const double slack = 1e-9 * scale;
  if (t < -slack || t > spec.t_f + slack)
    throw std::domain_error("rescaling: inversion target outside [0, t_f]");

  double lo = 0.0;
  double hi = spec.tau_final();
  double x = std::clamp(t / spec.a, lo, hi);
  const double target = tol * scale;
  double residual = 0.0;
  for (int it = 0; it < 200; ++it) {
    residual = eval_f(spec, x) - t;
    if (std::abs(residual) <= target) return x;
    if (residual > 0.0) hi = x; else lo = x;
    const double slope = eval_f_prime(spec, x);
    double next = x;
    if (slope > 1e-14) next = x - residual / slope;
    if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
    x = next;
  }
  std::ostringstream msg;
  msg << "rescaling: inversion of t=" << t << " stalled, residual " << std::abs(residual);
  throw ConvergenceError(msg.str(), std::abs(residual));
}

StaValidationReport validate_sta(const RescalingSpec& spec, double tol) {
  check_spec(spec);
  if (!(tol > 0.0))
    throw std::invalid_argument("rescaling: validation tolerance must be > 0");

  StaValidationReport report;
  report.tolerance = tol;
  const double scale = std::max(1.0, spec.t_f);
  const double inv_tol = std::min(tol, 1e-12);

  try {
    const double tau0 = invert_f(spec, 0.0, inv_tol);
    report.initial_time_ok = std::abs(tau0) <= tol * scale;
  } catch (const ConvergenceError&) {
    report.initial_time_ok = false;
  }
  try {
    const double tau_f = invert_f(spec, spec.t_f, inv_tol);
    report.faster_ok = tau_f < spec.t_f - tol * scale;
    report.final_rate_ok = std::abs(eval_f_prime(spec, tau_f) - 1.0) <= tol;
  } catch (const ConvergenceError&) {
    report.faster_ok = false;
    report.final_rate_ok = false;
  }
  report.initial_rate_ok = std::abs(eval_f_prime(spec, 0.0) - 1.0) <= tol;
  return report;
}

}  // namespace trqd
