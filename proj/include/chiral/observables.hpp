#pragma once

#include <Eigen/Dense>

#include "chiral/dynamics.hpp"
#include "chiral/model.hpp"

namespace chiral {

/// Probabilities that the single excitation leaves through mode a, through
/// mode b, or is trapped in the cavity dark state.
struct EmissionProbabilities {
  double p_a;
  double p_b;
  double p_dark;

  double p_emit() const { return p_a + p_b; }
};

/// Exact P_a = 2 kappa \int_0^inf |alpha|^2 dt (and P_b likewise) from the
/// two-exponential slaved cavity amplitudes. Requires zero decay rates and
/// detunings; throws undefined_quantity when every coupling vanishes.
///
/// The degenerate configurations where the dark-state overlap formula is 0/0
/// resolve to the trapped fraction of the eliminated dynamics: g_q = 0 keeps
/// the QD excited forever (p_dark = 1), g_a = g_b = 0 leaves no trap
/// (p_dark = 0).
EmissionProbabilities emission_probabilities(const SystemParams& params);

/// Older closed form for (P_a, P_b) in terms of lambda_plus * lambda_minus.
/// Its a:b ratio is correct but its prefactor is 16x too large, so it does not
/// satisfy P_a + P_b + P_dark = 1. Kept for audit only.
struct PrintedEmission {
  double p_a;
  double p_b;
  bool audit_only = true;
};

PrintedEmission printed_emission_probabilities(const SystemParams& params);

/// D = (g_a^2 - g_b^2) / (g_a^2 + g_b^2 + 2 g_q^2), the normalized excess of
/// mode-b over mode-a emission.
double directionality(const SystemParams& params);

/// D in terms of qd_ratio r and atom_ratio r_a: (1 - r_a^2) / (1 + r_a^2 + 2 r^2).
double directionality_from_ratios(double qd_ratio, double atom_ratio);

/// Upper bound of D at fixed atom ratio, reached as g_q -> 0.
double max_directionality(double atom_ratio);

/// Emitter state decoupled from both cavity modes, basis (|E,g>, |G,+>, |G,->).
struct DarkState {
  double q;
  double a;
  double b;
  double norm_constant;

  Eigen::Vector3d vector() const { return {q, a, b}; }
  /// Same state in the five-amplitude basis with an empty cavity.
  AmplitudeState embedded() const;
};

/// Throws no_dark_state naming the vanishing coupling when any g is zero.
/// The atom components are adjusted by at most a few ulps so that the state
/// is stationary under full_rhs bit for bit.
DarkState dark_state(const SystemParams& params);

/// Overlap |<CD|E,g,0,0>|^2, i.e. the trapping probability.
double dark_state_probability(const SystemParams& params);

bool has_dark_state(const SystemParams& params);

struct ReducedDensityReport {
  Eigen::Matrix2d rho_qd;  ///< basis (|G>, |E>)
  double purity_qd;
  double purity_atom;
};

ReducedDensityReport reduced_density(const DarkState& state);

/// Concurrence of a normalized emitter state. Evaluates sqrt(2 (1 - tr rho^2))
/// from the QD reduction and 2 |Q| sqrt(A^2 + B^2), and throws if the two
/// disagree (squared values compared to 1e-12).
double concurrence(const DarkState& state);

/// Both concurrence routes, for callers that want to inspect them.
struct ConcurrenceRoutes {
  double from_purity;
  double closed_form;
};

ConcurrenceRoutes concurrence_routes(const DarkState& state);

/// Concurrence of the dark state straight from the couplings. Returns 0 when
/// g_b == 0 (no dark state); has_dark_state() tells the two cases apart.
double concurrence_from_couplings(const SystemParams& params);

/// Ratio form, 2 sqrt(1 + r_a^2) / (r/r_a + r r_a + r_a/r). Needs r >= 0 and
/// r_a > 0; r == 0 gives 0.
double concurrence_from_ratios(double qd_ratio, double atom_ratio);

/// Inverts D(r, r_a) for r. Requires 0 < r_a < 1 and 0 < D <= max_directionality.
double ratio_from_directionality(double d, double atom_ratio);

/// Concurrence as a function of directionality at fixed atom ratio.
double concurrence_vs_directionality(double d, double atom_ratio);

/// r at which the concurrence reaches 1: r_a / sqrt(1 + r_a^2).
double peak_ratio(double atom_ratio);

/// Directionality at the concurrence peak.
double peak_directionality(double atom_ratio);

enum class Branch {
  rising,   ///< r above the peak ratio: lower D, C increasing with D
  falling,  ///< r below the peak ratio: D close to its maximum
};

/// r giving a target concurrence in (0, 1] on the requested side of the peak.
double ratio_for_concurrence(double target, double atom_ratio, Branch branch);

}  // namespace chiral
