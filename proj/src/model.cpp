#include "chiral/model.hpp"

#include <algorithm>
#include <cmath>
#include <initializer_list>
#include <sstream>

namespace chiral {

std::string_view to_string(ErrorCategory category) noexcept {
  switch (category) {
    case ErrorCategory::invalid_parameter: return "invalid_parameter";
    case ErrorCategory::undefined_quantity: return "undefined_quantity";
    case ErrorCategory::no_dark_state: return "no_dark_state";
    case ErrorCategory::unsupported_regime: return "unsupported_regime";
    case ErrorCategory::out_of_domain: return "out_of_domain";
    case ErrorCategory::integration_failure: return "integration_failure";
    case ErrorCategory::insufficient_counts: return "insufficient_counts";
    case ErrorCategory::config: return "config";
    case ErrorCategory::io: return "io";
  }
  return "unknown";
}

namespace {

void require_rate(const char* name, double value, bool allow_negative) {
  if (!std::isfinite(value)) {
    throw Error(ErrorCategory::invalid_parameter, std::string(name) + " must be finite");
  }
  if (!allow_negative && value < 0) {
    std::ostringstream msg;
    msg << name << " must be >= 0, got " << value;
    throw Error(ErrorCategory::invalid_parameter, msg.str());
  }
}

}  // namespace

SystemParams::SystemParams(double g_q, double g_a, double g_b, double kappa)
    : g_q_(g_q), g_a_(g_a), g_b_(g_b), kappa_(kappa) {
  validate();
}

SystemParams SystemParams::with_decay(double gamma_q, double gamma_a, double gamma_b) const {
  SystemParams out = *this;
  out.gamma_q_ = gamma_q;
  out.gamma_a_ = gamma_a;
  out.gamma_b_ = gamma_b;
  out.validate();
  return out;
}

SystemParams SystemParams::with_detuning(double delta_q, double delta_a, double delta_b) const {
  SystemParams out = *this;
  out.delta_q_ = delta_q;
  out.delta_a_ = delta_a;
  out.delta_b_ = delta_b;
  out.validate();
  return out;
}

bool SystemParams::is_ideal() const noexcept {
  return gamma_q_ == 0 && gamma_a_ == 0 && gamma_b_ == 0 &&
         delta_q_ == 0 && delta_a_ == 0 && delta_b_ == 0;
}

void SystemParams::validate() const {
  require_rate("g_q", g_q_, false);
  require_rate("g_a", g_a_, false);
  require_rate("g_b", g_b_, false);
  require_rate("kappa", kappa_, false);
  if (!(kappa_ > 0)) throw Error(ErrorCategory::invalid_parameter, "kappa must be > 0");
  require_rate("gamma_q", gamma_q_, false);
  require_rate("gamma_a", gamma_a_, false);
  require_rate("gamma_b", gamma_b_, false);
  require_rate("delta_q", delta_q_, true);
  require_rate("delta_a", delta_a_, true);
  require_rate("delta_b", delta_b_, true);
}

EffectiveRates derive_effective_rates(const SystemParams& p) {
  EffectiveRates out{};
  out.rate_q = 2.0 * p.g_q() * p.g_q() / p.kappa();
  out.rate_a = p.g_a() * p.g_a() / p.kappa();
  out.rate_b = p.g_b() * p.g_b() / p.kappa();
  out.splitting = std::hypot(out.rate_a - out.rate_b, out.rate_q);

  const double total = out.rate_a + out.rate_b + out.rate_q;
  out.lambda_minus = -(total + out.splitting) / 2.0;
  if (out.lambda_minus == 0) {
    out.lambda_plus = 0;
    return out;
  }
  // lambda_plus from the product of the roots; the textbook difference form
  // cancels catastrophically when one rate dominates.
  const double product = out.rate_a * out.rate_b + out.rate_q * (out.rate_a + out.rate_b) / 2.0;
  out.lambda_plus = product / out.lambda_minus + 0.0;
  return out;
}

CouplingRatios ratios_of(const SystemParams& p) {
  if (p.g_a() == 0) {
    throw Error(ErrorCategory::undefined_quantity, "coupling ratios need g_a > 0");
  }
  return {p.g_q() / p.g_a(), p.g_b() / p.g_a()};
}

SystemParams params_from_ratios(const CouplingRatios& ratios, double g_a, double kappa) {
  return SystemParams(ratios.qd_ratio * g_a, g_a, ratios.atom_ratio * g_a, kappa);
}

double cesium_atom_ratio() noexcept { return 1.0 / std::sqrt(45.0); }

RegimeReport check_regime(const SystemParams& p, double margin) {
  if (!(margin > 1)) {
    throw Error(ErrorCategory::invalid_parameter, "regime margin must be > 1");
  }
  RegimeReport report{true, true, 0.0, {}};

  const double max_g = std::max({p.g_q(), p.g_a(), p.g_b()});
  const double max_gamma = std::max({p.gamma_q(), p.gamma_a(), p.gamma_b()});
  double min_g = 0;
  for (double g : {p.g_q(), p.g_a(), p.g_b()}) {
    if (g > 0 && (min_g == 0 || g < min_g)) min_g = g;
  }

  const double cavity_ratio = max_g / p.kappa();
  report.worst_ratio = cavity_ratio;
  if (max_g * margin > p.kappa()) {
    report.bad_cavity_ok = false;
    std::ostringstream msg;
    msg << "largest coupling " << max_g << " is not " << margin << "x below kappa " << p.kappa();
    report.messages.push_back(msg.str());
  }

  if (max_gamma > 0) {
    if (min_g == 0) {
      report.purcell_ok = false;
      report.worst_ratio = INFINITY;
      report.messages.emplace_back("spontaneous emission present but no emitter couples to the cavity");
    } else {
      const double purcell_ratio = max_gamma / min_g;
      report.worst_ratio = std::max(report.worst_ratio, purcell_ratio);
      if (max_gamma * margin > min_g) {
        report.purcell_ok = false;
        std::ostringstream msg;
        msg << "largest decay rate " << max_gamma << " is not " << margin
            << "x below the weakest coupling " << min_g;
        report.messages.push_back(msg.str());
      }
    }
  }
  return report;
}

}  // namespace chiral
