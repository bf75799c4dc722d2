#pragma once

#include <functional>
#include <string>

#include "trqd/errors.hpp"

namespace trqd {

enum class RescalingFamily { Sinusoidal, Polynomial, Custom };

std::string to_string(RescalingFamily family);
RescalingFamily rescaling_family_from_string(const std::string& name);

/// A time-rescaling function f mapping the compressed interval [0, t_f/a]
/// onto the reference interval [0, t_f].  Both built-in families satisfy
/// the endpoint identities f(0)=0, f(t_f/a)=t_f, f'(0)=f'(t_f/a)=1, and
/// are strictly increasing for a >= 1 (f' ranges over [1, 2a-1] for the
/// sinusoidal family and [1, (3a-1)/2] for the polynomial one).
///
/// a > 1 contracts the protocol, a = 1 is the identity, 0 < a < 1 dilates.
/// Large a makes the rescaled schedule stiff; step counts for propagation
/// should grow roughly linearly with a.
struct RescalingSpec {
  RescalingFamily family = RescalingFamily::Sinusoidal;
  double a = 1.0;    // time contraction parameter, > 0
  double t_f = 1.0;  // reference protocol duration, > 0

  // Custom family only: user-supplied f and f'.  Not validated
  // analytically; run validate_sta() to probe the boundary conditions.
  std::function<double(double)> custom_f;
  std::function<double(double)> custom_f_prime;

  /// Duration of the rescaled protocol.
  double tau_final() const { return t_f / a; }
};

RescalingSpec make_rescaling(RescalingFamily family, double a, double t_f);
RescalingSpec make_custom_rescaling(std::function<double(double)> f,
                                    std::function<double(double)> f_prime,
                                    double a, double t_f);

/// Result of numerically probing the four requirements a rescaling must
/// meet to act as a shortcut: equal initial times, shorter duration, and
/// equal initial/final Hamiltonians (unit rate at both ends).
struct StaValidationReport {
  bool initial_time_ok = false;  // f^-1(0) = 0
  bool faster_ok = false;        // f^-1(t_f) < t_f
  bool initial_rate_ok = false;  // f'(0) = 1
  bool final_rate_ok = false;    // f'(f^-1(t_f)) = 1
  double tolerance = 0.0;

  bool all_ok() const {
    return initial_time_ok && faster_ok && initial_rate_ok && final_rate_ok;
  }
};

double eval_f(const RescalingSpec& spec, double tau);
double eval_f_prime(const RescalingSpec& spec, double tau);

/// Inverts t = f(tau) on [0, t_f/a] by safeguarded Newton iteration with a
/// bisection fallback (valid because f is increasing there).  The result
/// satisfies |f(tau) - t| <= tol * max(1, t_f).
double invert_f(const RescalingSpec& spec, double t, double tol = 1e-12);

StaValidationReport validate_sta(const RescalingSpec& spec, double tol = 1e-9);

}  // namespace trqd
