#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <complex>
#include <random>

#include "trqd/metrics.hpp"
#include "trqd/propagate.hpp"

using namespace trqd;
using cd = std::complex<double>;

namespace {

constexpr double kPi = 3.14159265358979323846;

double max_abs(const Eigen::MatrixXcd& m) { return m.cwiseAbs().maxCoeff(); }

Eigen::Matrix2cd pauli_x() {
  Eigen::Matrix2cd m;
  m << 0, 1, 1, 0;
  return m;
}

Eigen::Matrix2cd pauli_z() {
  Eigen::Matrix2cd m;
  m << 1, 0, 0, -1;
  return m;
}

StateVector sx_plus() {
  StateVector psi(2);
  psi << 1.0 / std::sqrt(2.0), 1.0 / std::sqrt(2.0);
  return psi;
}

StateVector sx_minus() {
  StateVector psi(2);
  psi << 1.0 / std::sqrt(2.0), -1.0 / std::sqrt(2.0);
  return psi;
}

HamiltonianSchedule spin_z_reference(double omega, double t_f) {
  SpinParams params{1.0, 1.0};
  return spin_schedule(
      params, [omega](double) { return Eigen::Vector3d(0, 0, omega); }, 0.0, t_f);
}

HamiltonianSchedule compression_reference(int basis_dim, double t_f) {
  OscillatorParams params;
  params.basis_dim = basis_dim;
  return oscillator_schedule(
      params, [](double) { return 1.0; },
      [t_f](double t) { return compression_frequency(1.0, 6.0, t_f, t); }, 0.0, t_f);
}

}  // namespace

TEST_CASE("constant generator is exact for any step count") {
  // analytic oracle: exp(-i c T sigma_x) = cos(cT) I - i sin(cT) sigma_x
  const double c = 0.8, t_f = 2.0;
  const HamiltonianSchedule sched(2, 0.0, t_f, true,
                                  [c](double) { return Eigen::MatrixXcd(c * pauli_x()); });
  const Eigen::Matrix2cd expected =
      std::cos(c * t_f) * Eigen::Matrix2cd::Identity() - cd(0, 1) * std::sin(c * t_f) * pauli_x();
  for (long n : {1L, 7L, 100L}) {
    const PropagationResult result = propagate_ordered(sched, n);
    CHECK(max_abs(result.final_unitary - expected) <= 1e-13);
    CHECK(result.unitarity_defect <= 1e-13);
  }
}

TEST_CASE("constant spin-z flip: diag(-i, i) maps |S_x,+> to -i|S_x,->") {
  const HamiltonianSchedule ref = spin_z_reference(1.0, kPi);
  const PropagationResult result = propagate_ordered(ref, 64, 1.0, sx_plus());
  Eigen::Matrix2cd expected;
  expected << cd(0, -1), 0, 0, cd(0, 1);
  CHECK(max_abs(result.final_unitary - expected) <= 1e-12);
  const StateVector target = cd(0, -1) * sx_minus();
  CHECK((result.final_state - target).cwiseAbs().maxCoeff() <= 1e-12);
}

TEST_CASE("rotating field agrees with the rotating-frame closed form") {
  // H(t) = Omega(cos wt Sx + sin wt Sy); exact solution
  // U(t) = exp(-i w t Sz) exp(-i t (Omega Sx - w Sz))
  const double omega = 1.0, w = 0.7, t_f = 3.1;
  SpinParams params{1.0, 1.0};
  const HamiltonianSchedule sched = spin_schedule(
      params,
      [=](double t) {
        return Eigen::Vector3d(omega * std::cos(w * t), omega * std::sin(w * t), 0.0);
      },
      0.0, t_f);
  CHECK_FALSE(sched.commuting_family());

  const Eigen::MatrixXcd sz = 0.5 * pauli_z();
  const Eigen::MatrixXcd sx = 0.5 * pauli_x();
  const Eigen::MatrixXcd exact = hermitian_phase_exp(sz, w * t_f) *
                                 hermitian_phase_exp(omega * sx - w * sz, t_f);
  const PropagationResult result = propagate_ordered(sched, 100000);
  CHECK(max_abs(result.final_unitary - exact) <= 1e-8);
}

TEST_CASE("commuting propagator: rescaled spin-z accumulates total phase pi") {
  const double t_f = kPi;  // Omega = 1
  const HamiltonianSchedule ref = spin_z_reference(1.0, t_f);
  const RescalingSpec spec = make_rescaling(RescalingFamily::Sinusoidal, 2.0, t_f);
  const HamiltonianSchedule tr = time_rescale(ref, spec);
  CHECK(tr.commuting_family());

  const PropagationResult result = propagate_commuting(tr, 4001);
  Eigen::Matrix2cd expected;
  expected << cd(0, -1), 0, 0, cd(0, 1);
  CHECK(max_abs(result.final_unitary - expected) <= 1e-12);
}

TEST_CASE("commuting propagator: zero Hamiltonian gives the identity") {
  const HamiltonianSchedule zero(3, 0.0, 1.0, true,
                                 [](double) { return Eigen::MatrixXcd(Eigen::MatrixXcd::Zero(3, 3)); });
  const PropagationResult result = propagate_commuting(zero, 11);
  CHECK(max_abs(result.final_unitary - Eigen::MatrixXcd::Identity(3, 3)) == 0.0);
}

TEST_CASE("ordered and commuting propagators agree on the spin-z reference") {
  const HamiltonianSchedule ref = spin_z_reference(1.0, kPi);
  const PropagationResult ordered = propagate_ordered(ref, 10000);
  const PropagationResult commuting = propagate_commuting(ref, 10001);
  CHECK(max_abs(ordered.final_unitary - commuting.final_unitary) <= 1e-12);
}

TEST_CASE("ordered propagator converges at order >= 2 against the commuting oracle") {
  // commuting schedule with non-flat endpoints so the midpoint error is
  // genuinely O(n^-2)
  const HamiltonianSchedule sched(2, 0.0, 1.0, true, [](double t) {
    return Eigen::MatrixXcd((1.0 + t * t) * 0.5 * pauli_z());
  });
  const Eigen::MatrixXcd oracle = propagate_commuting(sched, 40001).final_unitary;
  double prev_err = 0.0;
  for (long n : {8L, 16L, 32L, 64L}) {
    const double err = max_abs(propagate_ordered(sched, n).final_unitary - oracle);
    if (n > 8) {
      const double order = std::log2(prev_err / err);
      CHECK(order >= 2.0 - 0.1);
    }
    prev_err = err;
  }
}

TEST_CASE("propagate_commuting refuses non-commuting schedules") {
  SpinParams params{1.0, 1.0};
  const HamiltonianSchedule rotating = spin_schedule(
      params, [](double t) { return Eigen::Vector3d(std::cos(t), std::sin(t), 0.0); }, 0.0,
      1.0);
  CHECK_THROWS_AS(propagate_commuting(rotating, 101), std::logic_error);
}

TEST_CASE("trajectories: strictly increasing times, preserved norm, endpoints") {
  const HamiltonianSchedule ref = spin_z_reference(1.0, kPi);
  const PropagationResult result = propagate_ordered(ref, 1000, 1.0, sx_plus(), 17);
  REQUIRE(result.trajectory.size() == 17);
  CHECK(result.trajectory.front().t == 0.0);
  CHECK(result.trajectory.back().t == kPi);
  for (std::size_t i = 1; i < result.trajectory.size(); ++i)
    CHECK(result.trajectory[i].t > result.trajectory[i - 1].t);
  for (const auto& sample : result.trajectory)
    CHECK(std::abs(sample.state.norm() - 1.0) <= 1e-10);
  CHECK((result.trajectory.back().state - result.final_state).cwiseAbs().maxCoeff() == 0.0);

  // commuting path records the same kind of trajectory
  const PropagationResult commuting = propagate_commuting(ref, 10001, 1.0, sx_plus(), 9);
  REQUIRE(commuting.trajectory.size() == 9);
  for (std::size_t i = 1; i < commuting.trajectory.size(); ++i) {
    CHECK(commuting.trajectory[i].t > commuting.trajectory[i - 1].t);
    CHECK(std::abs(commuting.trajectory[i].state.norm() - 1.0) <= 1e-10);
  }
  // both paths should agree along the way on a commuting schedule
  const PropagationResult ordered = propagate_ordered(ref, 9000, 1.0, sx_plus(), 9);
  for (std::size_t i = 0; i < 9; ++i)
    CHECK((commuting.trajectory[i].state - ordered.trajectory[i].state).cwiseAbs().maxCoeff() <=
          1e-10);
}

TEST_CASE("converge stops at the first doubling for a constant generator") {
  const HamiltonianSchedule sched(2, 0.0, 1.0, true,
                                  [](double) { return Eigen::MatrixXcd(0.3 * pauli_z()); });
  const PropagationResult result = converge(sched, 1e-12, 1000, 1.0, 4);
  CHECK(result.steps_used == 8);
  CHECK(result.refine_diff <= 1e-12);
}

TEST_CASE("converge on the compression stroke shows second-order refinement") {
  const HamiltonianSchedule ref = compression_reference(64, 10.0);
  std::vector<double> diffs;
  Eigen::MatrixXcd prev;
  for (long n : {500L, 1000L, 2000L, 4000L}) {
    const Eigen::MatrixXcd u = propagate_ordered(ref, n).final_unitary;
    if (prev.size() > 0) diffs.push_back(max_abs(u - prev));
    prev = u;
  }
  REQUIRE(diffs.size() == 3);
  CHECK(diffs[1] < diffs[0]);
  CHECK(diffs[2] < diffs[1]);
  // at least the second-order signature (~4x per doubling)
  CHECK(diffs[0] / diffs[1] >= 3.5);
  CHECK(diffs[1] / diffs[2] >= 3.5);
}

TEST_CASE("converge matches the commuting oracle on the rescaled spin-z") {
  const double t_f = kPi;
  const HamiltonianSchedule tr = time_rescale(spin_z_reference(1.0, t_f),
                                              make_rescaling(RescalingFamily::Sinusoidal, 2.0, t_f));
  const PropagationResult refined = converge(tr, 1e-10, 100000, 1.0, 16);
  const PropagationResult oracle = propagate_commuting(tr, 20001);
  CHECK(max_abs(refined.final_unitary - oracle.final_unitary) <= 1e-10);
}

TEST_CASE("converge reports the residual when it cannot reach tolerance") {
  SpinParams params{1.0, 1.0};
  const HamiltonianSchedule rotating = spin_schedule(
      params, [](double t) { return Eigen::Vector3d(std::cos(t), std::sin(t), 0.3); }, 0.0,
      3.0);
  try {
    converge(rotating, 1e-300, 64, 1.0, 8);
    FAIL("expected ConvergenceError");
  } catch (const ConvergenceError& err) {
    CHECK(err.residual() > 0.0);
  }
}

TEST_CASE("phase exponential matches the closed 2x2 form") {
  // exp(-i theta sigma_x / 2) = cos(theta/2) I - i sin(theta/2) sigma_x
  const double theta = 1.3;
  const Eigen::MatrixXcd u = hermitian_phase_exp(0.5 * pauli_x(), theta);
  const Eigen::Matrix2cd expected = std::cos(theta / 2) * Eigen::Matrix2cd::Identity() -
                                    cd(0, 1) * std::sin(theta / 2) * pauli_x();
  CHECK(max_abs(u - expected) <= 1e-14);
}

TEST_CASE("rescaled evolution is the reference reparameterized, at all times") {
  // U_tr(tau, 0) = U_ref(f(tau), 0) even for non-commuting schedules; the
  // endpoint equivalence is the special case tau = t_f/a
  SpinParams params{1.0, 1.0};
  const double t_f = 2.0;
  auto field = [](double t) {
    return Eigen::Vector3d(0.8 * std::cos(1.3 * t), 0.8 * std::sin(1.3 * t), 0.4);
  };
  const RescalingSpec spec = make_rescaling(RescalingFamily::Polynomial, 3.0, t_f);
  const HamiltonianSchedule ref = spin_schedule(params, field, 0.0, t_f);
  const HamiltonianSchedule tr = time_rescale(ref, spec);

  for (double frac : {0.3, 0.65, 1.0}) {
    const double tau_stop = frac * tr.t_end();
    const double t_stop = eval_f(spec, tau_stop);
    const HamiltonianSchedule tr_head(2, 0.0, tau_stop, false,
                                      [tr](double t) { return tr(t); });
    const HamiltonianSchedule ref_head = spin_schedule(params, field, 0.0, t_stop);
    const Eigen::MatrixXcd u_tr = propagate_ordered(tr_head, 20000).final_unitary;
    const Eigen::MatrixXcd u_ref = propagate_ordered(ref_head, 20000).final_unitary;
    CHECK(max_abs(u_tr - u_ref) <= 1e-7);
  }
}

TEST_CASE("shortcut is state independent: operator-level match implies fidelity") {
  SpinParams params{1.0, 1.0};
  const double t_f = kPi;
  const HamiltonianSchedule ref = spin_schedule(
      params,
      [](double t) {
        const double s = std::sin(kPi / 4.0);
        return Eigen::Vector3d(s * std::cos(0.5 * t), s * std::sin(0.5 * t), std::cos(kPi / 4.0));
      },
      0.0, t_f);
  const HamiltonianSchedule tr =
      time_rescale(ref, make_rescaling(RescalingFamily::Sinusoidal, 2.0, t_f));

  const double tol = 3e-7;
  const Eigen::MatrixXcd u_ref = converge(ref, 1e-7, 1 << 18, 1.0, 256).final_unitary;
  const Eigen::MatrixXcd u_tr = converge(tr, 1e-7, 1 << 18, 1.0, 256).final_unitary;
  CHECK(max_abs(u_ref - u_tr) < tol);

  std::mt19937 rng(2024);
  std::normal_distribution<double> gauss(0.0, 1.0);
  for (int i = 0; i < 20; ++i) {
    StateVector psi(2);
    psi << cd(gauss(rng), gauss(rng)), cd(gauss(rng), gauss(rng));
    psi.normalize();
    const double f = fidelity(StateVector(u_ref * psi), StateVector(u_tr * psi));
    CHECK(f >= 1.0 - tol);
  }
}

TEST_CASE("propagation parameter errors") {
  const HamiltonianSchedule ref = spin_z_reference(1.0, 1.0);
  CHECK_THROWS_AS(propagate_ordered(ref, 0), std::invalid_argument);
  CHECK_THROWS_AS(propagate_ordered(ref, 10, -1.0), std::invalid_argument);
  StateVector wrong(3);
  wrong.setZero();
  CHECK_THROWS_AS(propagate_ordered(ref, 10, 1.0, wrong), std::invalid_argument);
  CHECK_THROWS_AS(propagate_ordered(ref, 10, 1.0, std::nullopt, 5), std::invalid_argument);
  CHECK_THROWS_AS(propagate_ordered(ref, 10, 1.0, sx_plus(), 1), std::invalid_argument);
  CHECK_THROWS_AS(propagate_commuting(ref, 4), std::invalid_argument);
  CHECK_THROWS_AS(converge(ref, 0.0, 100), std::invalid_argument);
  CHECK_THROWS_AS(converge(ref, 1e-6, 100, 1.0, 100), std::invalid_argument);

  // non-Hermitian evaluations are rejected
  const HamiltonianSchedule crooked(2, 0.0, 1.0, false, [](double) {
    Eigen::MatrixXcd m(2, 2);
    m << 1.0, cd(0.0, 0.5), cd(0.0, 0.5), 1.0;
    return m;
  });
  CHECK_THROWS_AS(propagate_ordered(crooked, 4), std::runtime_error);
}
