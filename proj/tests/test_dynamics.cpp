#include <cmath>
#include <random>

#include <doctest.h>

#include "chiral/dynamics.hpp"
#include "chiral/observables.hpp"
#include "oracles.hpp"

using namespace chiral;

namespace {

const Complex I{0.0, 1.0};

SystemParams cesium() {
  const double g_a = 0.05;
  return SystemParams(0.01, g_a, g_a * cesium_atom_ratio());
}

Vector5cd basis(Eigen::Index slot) {
  Vector5cd v = Vector5cd::Zero();
  v[slot] = 1.0;
  return v;
}

// Largest |(Q, A, B)_full - reduced| along a trajectory.
double reduced_deviation(const SystemParams& p) {
  StepControl control = StepControl::adaptive(1e-11);
  const Trajectory traj = integrate_full(p, AmplitudeState::excited_dot(), default_horizon(p), control);
  double worst = 0;
  for (const AmplitudeState& s : traj.samples) {
    const Eigen::Vector3d red = reduced_propagate(p, s.t);
    worst = std::max({worst, std::abs(s.dot() - red[0]), std::abs(s.plus() - red[1]), std::abs(s.minus() - red[2])});
  }
  return worst;
}

}  // namespace

TEST_CASE("full_rhs on simple states") {
  const SystemParams p(0.1, 0.07, 0.03);
  const Vector5cd d = full_rhs(basis(kDot), p);
  CHECK(d[kDot] == Complex(0));
  CHECK(d[kPlus] == Complex(0));
  CHECK(d[kMinus] == Complex(0));
  CHECK(d[kModeA] == -I * 0.1);
  CHECK(d[kModeB] == -I * 0.1);

  const SystemParams lossy = p.with_decay(0.02, 0, 0).with_detuning(0.3, 0, 0);
  CHECK(std::abs(full_rhs(basis(kDot), lossy)[kDot] - Complex(-0.01, -0.3)) < 1e-17);

  // Empty-emitter photon in mode a leaks at kappa and feeds Q and A.
  const Vector5cd da = full_rhs(basis(kModeA), SystemParams(0.1, 0.07, 0.03, 2.0));
  CHECK(da[kModeA] == Complex(-2.0));
  CHECK(da[kDot] == -I * 0.1);
  CHECK(da[kPlus] == -I * 0.07);
  CHECK(da[kMinus] == Complex(0));
}

TEST_CASE("the dark state is stationary under full_rhs") {
  const Vector5cd d = full_rhs(dark_state(SystemParams(0.1, 0.1, 0.1)).embedded().amp, SystemParams(0.1, 0.1, 0.1));
  for (int k = 0; k < 5; ++k) CHECK(d[k] == Complex(0));

  std::mt19937_64 rng(21);
  for (int k = 0; k < 1000; ++k) {
    const auto g = oracle::draw_couplings(rng);
    const SystemParams p(g.g_q, g.g_a, g.g_b);
    const Vector5cd dr = full_rhs(dark_state(p).embedded().amp, p);
    for (int s = 0; s < 5; ++s) REQUIRE(dr[s] == Complex(0));
  }
}

TEST_CASE("fixed-step trajectory loses norm monotonically") {
  const SystemParams p(0.08, 0.1, 0.04);
  const Trajectory traj = integrate_full(p, AmplitudeState::excited_dot(), 200.0, StepControl::fixed(0.01));
  CHECK(traj.final_state().t == 200.0);
  CHECK(traj.samples.size() == 20001);
  for (std::size_t k = 1; k < traj.samples.size(); ++k) {
    REQUIRE(traj.samples[k].norm2() <= traj.samples[k - 1].norm2() + 1e-15);
  }
  // Probability lost equals probability emitted.
  const double lost = 1 - traj.final_state().norm2();
  CHECK(traj.emitted_a.back() + traj.emitted_b.back() == doctest::Approx(lost).epsilon(1e-8));
}

TEST_CASE("starting in the dark state nothing happens") {
  const SystemParams p = cesium();
  const AmplitudeState dark = dark_state(p).embedded();
  for (const StepControl& control : {StepControl::fixed(0.05), StepControl::adaptive(1e-10)}) {
    const Trajectory traj = integrate_full(p, dark, 500.0, control);
    for (const AmplitudeState& s : traj.samples) {
      REQUIRE((s.amp - dark.amp).norm() < 1e-10);
      REQUIRE(std::abs(s.mode_a()) < 1e-12);
      REQUIRE(std::abs(s.mode_b()) < 1e-12);
    }
  }
}

TEST_CASE("dark-state overlap is conserved along trajectories") {
  std::mt19937_64 rng(22);
  for (int k = 0; k < 20; ++k) {
    const auto g = oracle::draw_couplings(rng, 0.01, 0.1);
    const SystemParams p(g.g_q, g.g_a, g.g_b);
    const double tol = 1e-10;
    const Vector5cd cd = dark_state(p).embedded().amp;
    const Trajectory traj = integrate_full(p, AmplitudeState::excited_dot(), 2000.0, StepControl::adaptive(tol));
    const Complex start = cd.dot(traj.samples.front().amp);
    for (const AmplitudeState& s : traj.samples) REQUIRE(std::abs(cd.dot(s.amp) - start) < 10 * tol);
  }
}

TEST_CASE("cesium quadrature agrees with the analytic emission probabilities") {
  const SystemParams p = cesium();
  const Trajectory traj =
      integrate_full(p, AmplitudeState::excited_dot(), default_horizon(p), StepControl::adaptive(1e-10));
  const EmissionProbabilities e = emission_probabilities(p);
  CHECK(traj.emitted_a.back() == doctest::Approx(e.p_a).epsilon(0.05));
  CHECK(traj.emitted_b.back() == doctest::Approx(e.p_b).epsilon(0.05));
}

TEST_CASE("elimination error shrinks when couplings are halved") {
  const double big = reduced_deviation(params_from_ratios({0.2, cesium_atom_ratio()}, 0.05));
  const double small = reduced_deviation(params_from_ratios({0.2, cesium_atom_ratio()}, 0.025));
  CHECK(small < big);
  CHECK(big < 0.05);
}

TEST_CASE("adaptive step underflow reports the last good state") {
  StepControl control = StepControl::adaptive(1e-14);
  control.dt = 1.0;
  control.min_dt = 0.5;
  try {
    integrate_full(SystemParams(0.3, 0.3, 0.3), AmplitudeState::excited_dot(), 10.0, control);
    FAIL("expected an integration failure");
  } catch (const IntegrationError& e) {
    CHECK(e.category() == ErrorCategory::integration_failure);
    CHECK(e.last_good().t == 0.0);
    CHECK(e.last_good().dot() == Complex(1.0));
  }
  CHECK_THROWS_AS(integrate_full(cesium(), AmplitudeState::excited_dot(), -1.0), Error);
}

TEST_CASE("sample_interval thins output but keeps the endpoint") {
  StepControl control = StepControl::fixed(0.01);
  control.sample_interval = 1.0;
  const Trajectory traj = integrate_full(cesium(), AmplitudeState::excited_dot(), 10.5, control);
  CHECK(traj.samples.size() >= 11);
  CHECK(traj.samples.size() <= 12);
  CHECK(traj.final_state().t == 10.5);
}

TEST_CASE("reduced propagation: start, equal couplings and long times") {
  const Eigen::Vector3d start = reduced_propagate(cesium(), 0.0);
  CHECK((start - Eigen::Vector3d(1, 0, 0)).norm() < 1e-14);

  const double g = 0.1, gamma = g * g;
  const SystemParams eq(g, g, g);
  for (double t : {0.5, 10.0, 50.0, 300.0}) {
    const double tail = std::exp(-3 * gamma * t);
    const Eigen::Vector3d x = reduced_propagate(eq, t);
    CHECK(x[0] == doctest::Approx(1.0 / 3 + 2.0 / 3 * tail).epsilon(1e-13));
    CHECK(x[1] == doctest::Approx(-1.0 / 3 + 1.0 / 3 * tail).epsilon(1e-13));
    CHECK(x[2] == doctest::Approx(-1.0 / 3 + 1.0 / 3 * tail).epsilon(1e-13));
  }
  const Eigen::Vector3d inf = reduced_propagate(eq, 1e5);
  CHECK((inf - Eigen::Vector3d(1, -1, -1) / 3).norm() < 1e-14);
  CHECK(inf.squaredNorm() == doctest::Approx(1.0 / 3).epsilon(1e-13));

  CHECK_THROWS_AS(reduced_propagate(eq.with_decay(0.01, 0, 0), 1.0), Error);
}

TEST_CASE("reduced propagation matches a generic matrix exponential") {
  std::mt19937_64 rng(23);
  std::uniform_real_distribution<double> times(0, 3);
  for (int k = 0; k < 300; ++k) {
    const auto g = oracle::draw_couplings(rng);
    const SystemParams p(g.g_q, g.g_a, g.g_b);
    const double slow = std::abs(derive_effective_rates(p).lambda_plus);
    const double t = times(rng) / slow;
    const Eigen::Vector3d expected = oracle::propagate(oracle::generator(g.g_q, g.g_a, g.g_b), t);
    REQUIRE((reduced_propagate(p, t) - expected).norm() < 1e-10);
  }
}

TEST_CASE("long-time limit is the dark-state projection") {
  std::mt19937_64 rng(24);
  for (int k = 0; k < 300; ++k) {
    const auto g = oracle::draw_couplings(rng);
    const SystemParams p(g.g_q, g.g_a, g.g_b);
    const DarkState cd = dark_state(p);
    const Eigen::Vector3d expected = cd.q * cd.vector();
    REQUIRE((reduced_propagate(p, default_horizon(p)) - expected).norm() < 1e-10);
  }
}

TEST_CASE("decaying closed form") {
  const double g = 0.1, gamma = g * g;
  const SystemParams eq(g, g, g);
  CHECK((decaying_emitter_amplitudes(eq, 0) - Eigen::Vector3d(1, 0, 0)).norm() < 1e-15);
  CHECK(decaying_emitter_amplitudes(eq, 1e5).norm() < 1e-300);
  for (double t : {1.0, 30.0, 200.0}) {
    const double q = decaying_emitter_amplitudes(eq, t)[0];
    CHECK(q == doctest::Approx(0.5 * std::exp(-gamma * t) + 0.5 * std::exp(-3 * gamma * t)).epsilon(1e-13));
  }
  CHECK_THROWS_AS(decaying_emitter_amplitudes(SystemParams(0, 0.1, 0.1), 1.0), Error);
}

TEST_CASE("decaying form agrees with the reduced propagator only at t = 0") {
  std::mt19937_64 rng(25);
  for (int k = 0; k < 300; ++k) {
    const auto g = oracle::draw_couplings(rng);
    const SystemParams p(g.g_q, g.g_a, g.g_b);
    CHECK((decaying_emitter_amplitudes(p, 0) - reduced_propagate(p, 0)).norm() < 1e-14);
    const double late = default_horizon(p);
    const double p_dark = dark_state_probability(p);
    const double gap = (decaying_emitter_amplitudes(p, late) - reduced_propagate(p, late)).norm();
    CHECK(gap == doctest::Approx(std::sqrt(p_dark)).epsilon(1e-6));
  }
}

TEST_CASE("closed-form cavity amplitudes") {
  const double g = 0.1, gamma = g * g;
  const SystemParams eq(g, g, g);
  const CavityAmplitudes c0 = closed_form_cavity(eq, 0);
  CHECK(std::abs(c0.alpha - (-I * g)) < 1e-16);
  CHECK(std::abs(c0.beta - (-I * g)) < 1e-16);
  for (double t : {1.0, 40.0, 300.0}) {
    const CavityAmplitudes c = closed_form_cavity(eq, t);
    const Complex expected = -I * g * std::exp(-3 * gamma * t);
    CHECK(std::abs(c.alpha - expected) < 1e-15);
    CHECK(std::abs(c.beta - expected) < 1e-15);
  }
}

TEST_CASE("closed-form cavity amplitudes are the slaved ones") {
  std::mt19937_64 rng(26);
  for (int k = 0; k < 1000; ++k) {
    const auto g = oracle::draw_couplings(rng);
    const SystemParams p(g.g_q, g.g_a, g.g_b);
    const Eigen::Vector3d x = oracle::propagate(oracle::generator(g.g_q, g.g_a, g.g_b), 1.0);
    const CavityAmplitudes c = closed_form_cavity(p, 1.0);
    REQUIRE(std::abs(c.alpha - (-I * (g.g_q * x[0] + g.g_a * x[1]))) < 1e-10);
    REQUIRE(std::abs(c.beta - (-I * (g.g_q * x[0] + g.g_b * x[2]))) < 1e-10);
  }
}

TEST_CASE("integrated cavity emission equals one minus the trapped probability") {
  std::mt19937_64 rng(27);
  for (int k = 0; k < 100; ++k) {
    const auto g = oracle::draw_couplings(rng, 0.005, 0.3);
    const SystemParams p(g.g_q, g.g_a, g.g_b);
    const EffectiveRates r = derive_effective_rates(p);
    const auto flux = [&](double t) {
      const CavityAmplitudes c = closed_form_cavity(p, t);
      return 2 * p.kappa() * (std::norm(c.alpha) + std::norm(c.beta));
    };
    const double emitted = oracle::integrate(flux, 1e-3 / std::abs(r.lambda_minus), 60 / std::abs(r.lambda_plus));
    REQUIRE(emitted == doctest::Approx(1 - dark_state_probability(p)).epsilon(1e-10));
  }
}

TEST_CASE("default horizon") {
  const SystemParams p = cesium();
  CHECK(default_horizon(p) == doctest::Approx(40 / std::abs(derive_effective_rates(p).lambda_plus)));
  CHECK(default_horizon(SystemParams(0, 0, 0)) == 40.0);
}
