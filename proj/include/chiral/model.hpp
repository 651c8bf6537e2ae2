#pragma once

#include <string>
#include <vector>

#include "chiral/errors.hpp"

namespace chiral {

/// Physical rates of one experiment: a two-level quantum dot coupled to both
/// modes of a ring cavity, and a V-type atom whose |+> and |-> transitions
/// couple to mode a and mode b respectively.
///
/// All values are rates. The library keeps kappa explicit in every formula,
/// so any consistent unit works; the CLI normalises to kappa = 1 and then
/// time is measured in 1/kappa.
///
/// Instances are validated on construction and immutable afterwards.
class SystemParams {
 public:
  SystemParams(double g_q, double g_a, double g_b, double kappa = 1.0);

  /// Copy with the spontaneous emission rates replaced.
  SystemParams with_decay(double gamma_q, double gamma_a, double gamma_b) const;
  /// Copy with the emitter detunings replaced.
  SystemParams with_detuning(double delta_q, double delta_a, double delta_b) const;

  double g_q() const noexcept { return g_q_; }
  double g_a() const noexcept { return g_a_; }
  double g_b() const noexcept { return g_b_; }
  double kappa() const noexcept { return kappa_; }
  double gamma_q() const noexcept { return gamma_q_; }
  double gamma_a() const noexcept { return gamma_a_; }
  double gamma_b() const noexcept { return gamma_b_; }
  double delta_q() const noexcept { return delta_q_; }
  double delta_a() const noexcept { return delta_a_; }
  double delta_b() const noexcept { return delta_b_; }

  /// True when every decay rate and detuning is exactly zero, the setting in
  /// which the closed-form results hold.
  bool is_ideal() const noexcept;
  bool all_couplings_zero() const noexcept { return g_q_ == 0 && g_a_ == 0 && g_b_ == 0; }

  friend bool operator==(const SystemParams&, const SystemParams&) = default;

 private:
  void validate() const;

  double g_q_, g_a_, g_b_, kappa_;
  double gamma_q_ = 0, gamma_a_ = 0, gamma_b_ = 0;
  double delta_q_ = 0, delta_a_ = 0, delta_b_ = 0;
};

/// Dimensionless couplings: qd_ratio = g_q/g_a, atom_ratio = g_b/g_a.
/// atom_ratio == 0 is representable and marks the configuration without a
/// cavity dark state.
struct CouplingRatios {
  double qd_ratio;
  double atom_ratio;
};

/// Cavity-mediated decay rates after eliminating the cavity modes, and the
/// two nonzero eigenvalues of the resulting emitter generator.
struct EffectiveRates {
  double rate_q;        ///< 2 g_q^2 / kappa
  double rate_a;        ///< g_a^2 / kappa
  double rate_b;        ///< g_b^2 / kappa
  double splitting;     ///< sqrt((rate_a - rate_b)^2 + rate_q^2)
  double lambda_plus;   ///< slower decay eigenvalue, <= 0
  double lambda_minus;  ///< faster decay eigenvalue, <= lambda_plus
};

EffectiveRates derive_effective_rates(const SystemParams& params);

/// Throws ErrorCategory::undefined_quantity when g_a == 0.
CouplingRatios ratios_of(const SystemParams& params);

/// Builds parameters from ratios with the given g_a.
SystemParams params_from_ratios(const CouplingRatios& ratios, double g_a, double kappa = 1.0);

/// g_b / g_a for the cesium D2 line used throughout the examples: 1/sqrt(45).
double cesium_atom_ratio() noexcept;

struct RegimeReport {
  bool bad_cavity_ok;
  bool purcell_ok;
  double worst_ratio;
  std::vector<std::string> messages;
};

inline constexpr double kDefaultRegimeMargin = 10.0;

/// Checks gamma << g << kappa with "<<" meaning a factor of `margin`.
RegimeReport check_regime(const SystemParams& params, double margin = kDefaultRegimeMargin);

}  // namespace chiral
