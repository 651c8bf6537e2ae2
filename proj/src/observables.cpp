#include "chiral/observables.hpp"

#include <cmath>
#include <limits>
#include <optional>
#include <sstream>
#include <stdexcept>

#include "closed_form.hpp"

namespace chiral {

namespace {

void require_couplings(const SystemParams& p, const char* what) {
  if (p.all_couplings_zero()) {
    throw Error(ErrorCategory::undefined_quantity, std::string(what) + " is undefined when all couplings vanish");
  }
}

void require_atom_ratio(double atom_ratio) {
  if (!(atom_ratio > 0) || !(atom_ratio < 1)) {
    std::ostringstream msg;
    msg << "atom ratio g_b/g_a = " << atom_ratio
        << " must lie in (0, 1); otherwise D <= 0 for every qd ratio and D -> C cannot be inverted";
    throw Error(ErrorCategory::out_of_domain, msg.str());
  }
}

// Per-mode emitted probability from the two-exponential cavity amplitude:
// (rate_q/4) [c+^2 / (2|l+|) + c-^2 / (2|l-|) + 2 c+ c- / |l+ + l-|].
double mode_probability(const detail::TwoExponentials& c, const EffectiveRates& r) {
  const double total = r.rate_q + r.rate_a + r.rate_b;
  double sum = c.minus * c.minus / (2.0 * std::abs(r.lambda_minus)) + 2.0 * c.plus * c.minus / total;
  if (c.plus != 0 && r.lambda_plus != 0) {
    sum += c.plus * c.plus / (2.0 * std::abs(r.lambda_plus));
  }
  return r.rate_q / 4.0 * sum;
}

}  // namespace

EmissionProbabilities emission_probabilities(const SystemParams& p) {
  if (!p.is_ideal()) {
    throw Error(ErrorCategory::unsupported_regime,
                "analytic emission probabilities require zero decay rates and detunings");
  }
  require_couplings(p, "emission probability");
  if (p.g_q() == 0) return {0.0, 0.0, 1.0};

  const EffectiveRates rates = derive_effective_rates(p);
  const detail::CavityCoefficients c = detail::cavity_coefficients(p);
  EmissionProbabilities out{};
  out.p_a = mode_probability(c.mode_a, rates);
  out.p_b = mode_probability(c.mode_b, rates);
  out.p_dark = (p.g_a() == 0 && p.g_b() == 0) ? 0.0 : dark_state_probability(p);
  return out;
}

PrintedEmission printed_emission_probabilities(const SystemParams& p) {
  if (!p.is_ideal()) {
    throw Error(ErrorCategory::unsupported_regime,
                "printed emission probabilities require zero decay rates and detunings");
  }
  const EffectiveRates r = derive_effective_rates(p);
  const double product = r.lambda_plus * r.lambda_minus;
  const double total = r.rate_q + r.rate_a + r.rate_b;
  if (product == 0) {
    throw Error(ErrorCategory::undefined_quantity, "printed emission form is singular when lambda_plus = 0");
  }
  const double common = 4.0 / product * r.rate_q * (r.rate_a + r.rate_b) / total;
  return {common * (r.rate_q + 2.0 * r.rate_b), common * (r.rate_q + 2.0 * r.rate_a), true};
}

double directionality(const SystemParams& p) {
  require_couplings(p, "directionality");
  const double a2 = p.g_a() * p.g_a();
  const double b2 = p.g_b() * p.g_b();
  const double q2 = p.g_q() * p.g_q();
  return (a2 - b2) / (a2 + b2 + 2.0 * q2);
}

double directionality_from_ratios(double qd_ratio, double atom_ratio) {
  const double ra2 = atom_ratio * atom_ratio;
  return (1.0 - ra2) / (1.0 + ra2 + 2.0 * qd_ratio * qd_ratio);
}

double max_directionality(double atom_ratio) {
  const double ra2 = atom_ratio * atom_ratio;
  return (1.0 - ra2) / (1.0 + ra2);
}

AmplitudeState DarkState::embedded() const {
  AmplitudeState s;
  s.amp[kDot] = q;
  s.amp[kPlus] = a;
  s.amp[kMinus] = b;
  return s;
}

namespace {

// Searches within a few ulps of `guess` for y with g_y * y rounding to
// exactly `target`.
std::optional<double> partner(double target, double g_y, double guess) {
  double up = guess, down = guess;
  for (int step = 0; step <= 4; ++step) {
    if (g_y * up == target) return up;
    if (g_y * down == target) return down;
    up = std::nextafter(up, std::numeric_limits<double>::infinity());
    down = std::nextafter(down, -std::numeric_limits<double>::infinity());
  }
  return std::nullopt;
}

// Nudges (q, a, b) by a few ulps so that g_q q + g_a a and g_q q + g_b b are
// zero in floating point, not just to roundoff. Products can step over the
// target, so q is searched as well. Returns the input if nothing is found.
Eigen::Vector3d exactly_dark(const Eigen::Vector3d& u, double g_q, double g_a, double g_b) {
  double up = u[0], down = u[0];
  for (int step = 0; step <= 32; ++step) {
    for (double q : {up, down}) {
      const auto a = partner(-(g_q * q), g_a, u[1]);
      const auto b = partner(-(g_q * q), g_b, u[2]);
      if (a && b) return {q, *a, *b};
    }
    up = std::nextafter(up, std::numeric_limits<double>::infinity());
    down = std::nextafter(down, -std::numeric_limits<double>::infinity());
  }
  return u;
}

}  // namespace

bool has_dark_state(const SystemParams& p) { return p.g_q() > 0 && p.g_a() > 0 && p.g_b() > 0; }

DarkState dark_state(const SystemParams& p) {
  const char* missing = p.g_q() == 0 ? "g_q" : p.g_a() == 0 ? "g_a" : p.g_b() == 0 ? "g_b" : nullptr;
  if (missing) {
    throw Error(ErrorCategory::no_dark_state, std::string("no cavity dark state: ") + missing + " is zero");
  }
  const Eigen::Vector3d v(-p.g_a() * p.g_b(), p.g_q() * p.g_b(), p.g_q() * p.g_a());
  const double norm = v.norm();
  const Eigen::Vector3d u = exactly_dark(v / norm, p.g_q(), p.g_a(), p.g_b());
  return {u[0], u[1], u[2], 1.0 / norm};
}

double dark_state_probability(const SystemParams& p) {
  const double ab = p.g_a() * p.g_b();
  const double qb = p.g_q() * p.g_b();
  const double qa = p.g_q() * p.g_a();
  const double denom = ab * ab + qb * qb + qa * qa;
  if (denom == 0) {
    throw Error(ErrorCategory::undefined_quantity,
                "dark-state probability is undefined when at least two couplings vanish");
  }
  return ab * ab / denom;
}

namespace {

void require_normalized(const DarkState& s) {
  const double n2 = s.q * s.q + s.a * s.a + s.b * s.b;
  if (!(std::abs(n2 - 1.0) <= 1e-12)) {
    std::ostringstream msg;
    msg << "emitter state is not normalized (|psi|^2 = " << n2 << ")";
    throw Error(ErrorCategory::invalid_parameter, msg.str());
  }
}

// Rows: QD {G, E}; columns: atom {g, +, -}.
Eigen::Matrix<double, 2, 3> coefficient_matrix(const DarkState& s) {
  Eigen::Matrix<double, 2, 3> psi;
  psi << 0.0, s.a, s.b,
         s.q, 0.0, 0.0;
  return psi;
}

}  // namespace

ReducedDensityReport reduced_density(const DarkState& s) {
  require_normalized(s);
  const Eigen::Matrix<double, 2, 3> psi = coefficient_matrix(s);
  const Eigen::Matrix2d rho_qd = psi * psi.transpose();
  const Eigen::Matrix3d rho_atom = psi.transpose() * psi;
  // Both reductions are symmetric, so tr(rho^2) is the squared Frobenius norm.
  return {rho_qd, rho_qd.squaredNorm(), rho_atom.squaredNorm()};
}

ConcurrenceRoutes concurrence_routes(const DarkState& s) {
  const ReducedDensityReport rho = reduced_density(s);
  const double linear_entropy = std::max(0.0, 2.0 * (1.0 - rho.purity_qd));
  return {std::sqrt(linear_entropy), 2.0 * std::abs(s.q) * std::hypot(s.a, s.b)};
}

double concurrence(const DarkState& s) {
  const ConcurrenceRoutes c = concurrence_routes(s);
  if (std::abs(c.from_purity * c.from_purity - c.closed_form * c.closed_form) > 1e-12) {
    std::ostringstream msg;
    msg.precision(17);
    msg << "concurrence routes disagree: purity route " << c.from_purity << ", closed form " << c.closed_form;
    throw std::logic_error(msg.str());
  }
  return c.closed_form;
}

double concurrence_from_couplings(const SystemParams& p) {
  const double ab = p.g_a() * p.g_b();
  const double qa = p.g_q() * p.g_a();
  const double qb = p.g_q() * p.g_b();
  const double denom = ab * ab + qa * qa + qb * qb;
  if (denom == 0) return 0.0;
  return 2.0 * p.g_q() * ab * std::hypot(p.g_a(), p.g_b()) / denom;
}

double concurrence_from_ratios(double qd_ratio, double atom_ratio) {
  if (!(qd_ratio >= 0) || !(atom_ratio >= 0)) {
    throw Error(ErrorCategory::invalid_parameter, "coupling ratios must be non-negative");
  }
  if (qd_ratio == 0 || atom_ratio == 0) return 0.0;
  if (std::isinf(qd_ratio)) return 0.0;
  return 2.0 * std::sqrt(1.0 + atom_ratio * atom_ratio) /
         (qd_ratio / atom_ratio + qd_ratio * atom_ratio + atom_ratio / qd_ratio);
}

double ratio_from_directionality(double d, double atom_ratio) {
  require_atom_ratio(atom_ratio);
  const double d_max = max_directionality(atom_ratio);
  constexpr double slack = 4.0 * std::numeric_limits<double>::epsilon();
  if (!(d > 0) || !(d <= d_max * (1.0 + slack))) {
    std::ostringstream msg;
    msg.precision(17);
    msg << "directionality " << d << " is outside the invertible range (0, " << d_max << "]";
    throw Error(ErrorCategory::out_of_domain, msg.str());
  }
  const double ra2 = atom_ratio * atom_ratio;
  const double radicand = ((1.0 - ra2) - (1.0 + ra2) * d) / (2.0 * d);
  return std::sqrt(std::max(0.0, radicand));
}

double concurrence_vs_directionality(double d, double atom_ratio) {
  return concurrence_from_ratios(ratio_from_directionality(d, atom_ratio), atom_ratio);
}

double peak_ratio(double atom_ratio) { return atom_ratio / std::sqrt(1.0 + atom_ratio * atom_ratio); }

double peak_directionality(double atom_ratio) {
  return directionality_from_ratios(peak_ratio(atom_ratio), atom_ratio);
}

double ratio_for_concurrence(double target, double atom_ratio, Branch branch) {
  if (!(target > 0) || !(target <= 1)) {
    throw Error(ErrorCategory::out_of_domain, "target concurrence must lie in (0, 1]");
  }
  if (!(atom_ratio > 0)) {
    throw Error(ErrorCategory::out_of_domain, "atom ratio must be positive");
  }
  // Roots of C (r_a + 1/r_a) r^2 - 2 sqrt(1 + r_a^2) r + C r_a = 0.
  const double root = std::sqrt((1.0 - target) * (1.0 + target));
  const double scale = atom_ratio / std::sqrt(1.0 + atom_ratio * atom_ratio);
  if (branch == Branch::rising) return scale * (1.0 + root) / target;
  return scale * target / (1.0 + root);
}

}  // namespace chiral
