// Acceptance suite: one line per criterion, nonzero exit if any fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include "chiral/dynamics.hpp"
#include "chiral/inference.hpp"
#include "chiral/observables.hpp"
#include "oracles.hpp"

using namespace chiral;

namespace {

struct Outcome {
  bool pass;
  std::string detail;
};

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

SystemParams cesium(double scale = 1.0) {
  const double g_a = 0.05 * scale;
  return SystemParams(0.01 * scale, g_a, g_a * cesium_atom_ratio());
}

std::vector<SystemParams> random_params(std::uint64_t seed, int count) {
  std::mt19937_64 rng(seed);
  std::vector<SystemParams> out;
  for (int k = 0; k < count; ++k) {
    const auto g = oracle::draw_couplings(rng, 1e-4, 1.0);
    out.emplace_back(g.g_q, g.g_a, g.g_b);
  }
  return out;
}

Outcome cesium_curve() {
  const double ra = cesium_atom_ratio();
  const double d_peak = 2024.0 / 2206;
  const double d_max = 44.0 / 46;
  const double c_peak = concurrence_vs_directionality(d_peak, ra);

  // Locate the maximum on a fine grid over (0, D_max].
  const int n = 200000;
  double best_c = -1, best_d = 0;
  for (int k = 1; k <= n; ++k) {
    const double d = d_max * k / n;
    const double c = concurrence_vs_directionality(d, ra);
    if (c > best_c) best_c = c, best_d = d;
  }
  const double c_end = concurrence_vs_directionality(d_max, ra);
  const bool pass = std::abs(c_peak - 1) < 1e-9 && std::abs(best_d - d_peak) <= d_max / n &&
                    std::abs(max_directionality(ra) - d_max) < 1e-15 && c_end == 0;
  return {pass, fmt("C(2024/2206) - 1 = %.2e, grid argmax D = %.6f, D_max = %.6f, C(D_max) = %g", c_peak - 1,
                    best_d, max_directionality(ra), c_end)};
}

Outcome sum_rule() {
  double worst = 0;
  for (const SystemParams& p : random_params(101, 10000)) {
    const EmissionProbabilities e = emission_probabilities(p);
    worst = std::max(worst, std::abs(e.p_a + e.p_b + e.p_dark - 1));
  }
  return {worst < 1e-12, fmt("max |P_a + P_b + P_CD - 1| = %.2e over 10^4 draws", worst)};
}

Outcome directionality_equivalence() {
  double worst = 0;
  for (const SystemParams& p : random_params(101, 10000)) {
    const EmissionProbabilities e = emission_probabilities(p);
    worst = std::max(worst, std::abs(directionality(p) - (e.p_b - e.p_a) / (e.p_b + e.p_a)));
  }
  return {worst < 1e-12, fmt("max |D - (P_b - P_a)/(P_b + P_a)| = %.2e over 10^4 draws", worst)};
}

Outcome concurrence_routes_agree() {
  std::mt19937_64 rng(104);
  std::uniform_real_distribution<double> log_r(std::log(0.03), std::log(10.0));
  std::uniform_real_distribution<double> atom(0.02, 0.95);
  std::uniform_real_distribution<double> coupling(1e-3, 0.3);
  double worst = 0;
  for (int k = 0; k < 1000; ++k) {
    const double r = std::exp(log_r(rng)), ra = atom(rng), g_a = coupling(rng);
    const SystemParams p(r * g_a, g_a, ra * g_a);
    const ConcurrenceRoutes routes = concurrence_routes(dark_state(p));
    const double reference = concurrence_from_couplings(p);
    for (double c : {routes.from_purity, routes.closed_form, concurrence_vs_directionality(directionality(p), ra)}) {
      worst = std::max(worst, std::abs(c - reference));
    }
  }
  return {worst < 1e-10, fmt("max spread between the four routes = %.2e over 10^3 draws", worst)};
}

double quadrature_deviation(const SystemParams& p) {
  const Trajectory traj =
      integrate_full(p, AmplitudeState::excited_dot(), default_horizon(p), StepControl::adaptive(1e-10));
  const EmissionProbabilities e = emission_probabilities(p);
  return std::max(std::abs(traj.emitted_a.back() / e.p_a - 1), std::abs(traj.emitted_b.back() / e.p_b - 1));
}

Outcome full_ode() {
  const double full = quadrature_deviation(cesium());
  const double half = quadrature_deviation(cesium(0.5));
  return {full < 0.05 && half < full,
          fmt("relative deviation %.3e at g_a = 0.05, %.3e at g_a = 0.025", full, half)};
}

Outcome dark_state_properties() {
  bool pass = true;
  std::string detail;

  // Stationarity, bit for bit.
  std::vector<SystemParams> cases = random_params(106, 1000);
  cases.push_back(SystemParams(0.1, 0.1, 0.1));
  cases.push_back(cesium());
  int nonzero = 0;
  for (const SystemParams& p : cases) {
    const Vector5cd d = full_rhs(dark_state(p).embedded().amp, p);
    for (int k = 0; k < 5; ++k) nonzero += d[k] != Complex(0);
  }
  pass &= nonzero == 0;
  detail += fmt("nonzero rhs entries %d over %zu states", nonzero, cases.size());

  const double tol = 1e-10;
  const SystemParams p = cesium();
  const Vector5cd cd = dark_state(p).embedded().amp;
  const Trajectory traj = integrate_full(p, AmplitudeState::excited_dot(), default_horizon(p), StepControl::adaptive(tol));
  double drift = 0;
  for (const AmplitudeState& s : traj.samples) {
    drift = std::max(drift, std::abs(cd.dot(s.amp) - cd.dot(traj.samples.front().amp)));
  }
  pass &= drift < 10 * tol;
  detail += fmt(", overlap drift %.2e", drift);

  const DarkState dark = dark_state(p);
  const double limit_err = (reduced_propagate(p, default_horizon(p)) - dark.q * dark.vector()).norm();
  pass &= limit_err < 1e-10;
  detail += fmt(", |x(inf) - <CD|E>CD| %.2e", limit_err);

  const double p_cd = emission_probabilities(SystemParams(0.1, 0.1, 0.1)).p_dark;
  pass &= std::abs(p_cd - 1.0 / 3) < 1e-12;
  detail += fmt(", P_CD(equal) = %.15f", p_cd);
  return {pass, detail};
}

Outcome error_scaling() {
  const SystemParams p = cesium_operating_point(kNearPeakConcurrence);
  const ScalingResult s = error_scaling_study(p, default_scaling_grid(), 200, 2024);
  double sigma_1e6 = NAN;
  std::uint64_t failures = 0;
  for (const ScalingPoint& pt : s.points) {
    failures += pt.failures;
    if (pt.n_runs == 1'000'000) sigma_1e6 = pt.sigma_c;
  }
  const bool pass = std::abs(s.exponent + 0.5) <= 0.05 && sigma_1e6 < 1e-2 && failures == 0;

  // Exactly at the peak the first-order spread vanishes; reported, not gated.
  const ScalingResult at_peak = error_scaling_study(cesium_operating_point(1.0), default_scaling_grid(), 50, 2025);
  return {pass, fmt("C = %.2f, slope %.4f (residual %.3f), sigma_C(1e6) = %.2e; at C = 1 the slope is %.3f",
                    kNearPeakConcurrence, s.exponent, s.residual, sigma_1e6, at_peak.exponent)};
}

Outcome calibration() {
  const SystemParams p = params_from_ratios({std::sqrt(0.1), cesium_atom_ratio()}, 0.05);
  const CoverageResult c = interval_coverage(p, 5000, 1000, 77);
  const double f = c.fraction();
  return {f >= 0.60 && f <= 0.76 && c.evaluated >= 900,
          fmt("D = %.3f, coverage %.3f (%llu of %llu, %llu excluded near the fold)", directionality(p), f,
              static_cast<unsigned long long>(c.covered), static_cast<unsigned long long>(c.evaluated),
              static_cast<unsigned long long>(c.excluded))};
}

Outcome errata() {
  bool pass = true;
  const SystemParams eq(0.1, 0.1, 0.1);
  const PrintedEmission printed = printed_emission_probabilities(eq);
  const EmissionProbabilities exact = emission_probabilities(eq);
  pass &= std::abs(printed.p_a - 16.0 / 3) < 1e-12;
  pass &= std::abs(printed.p_a + printed.p_b + exact.p_dark - 1) > 1;

  double ratio_err = 0;
  for (const SystemParams& p : random_params(109, 10000)) {
    const PrintedEmission pr = printed_emission_probabilities(p);
    ratio_err = std::max(ratio_err, std::abs((pr.p_b - pr.p_a) / (pr.p_b + pr.p_a) - directionality(p)));
  }
  pass &= ratio_err < 1e-12;

  const double late = default_horizon(eq);
  const double q_decaying = decaying_emitter_amplitudes(eq, late)[0];
  const double q_reduced = reduced_propagate(eq, late)[0];
  pass &= std::abs(q_decaying) < 1e-12 && std::abs(q_reduced - 1.0 / 3) < 1e-12;
  return {pass, fmt("printed P_a = %.12f, printed ratio vs D %.2e, Q(inf) decaying %.1e vs reduced %.12f",
                    printed.p_a, ratio_err, q_decaying, q_reduced)};
}

}  // namespace

int main() {
  const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria = {
      {"cesium C-D curve", cesium_curve},
      {"sum rule", sum_rule},
      {"directionality equivalence", directionality_equivalence},
      {"concurrence routes", concurrence_routes_agree},
      {"full ODE validation", full_ode},
      {"dark-state properties", dark_state_properties},
      {"error scaling", error_scaling},
      {"estimator calibration", calibration},
      {"errata audit", errata},
  };

  int failed = 0;
  for (std::size_t k = 0; k < criteria.size(); ++k) {
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = criteria[k].second();
    } catch (const std::exception& e) {
      o = {false, std::string("threw: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    std::printf("[%s] %zu %s: %s (%.2f s)\n", o.pass ? "PASS" : "FAIL", k + 1, criteria[k].first, o.detail.c_str(),
                secs);
    std::fflush(stdout);
    failed += !o.pass;
  }
  std::printf("%d of %zu criteria passed\n", static_cast<int>(criteria.size()) - failed, criteria.size());
  return failed ? 1 : 0;
}
