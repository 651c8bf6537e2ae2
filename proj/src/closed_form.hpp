#pragma once

// Shared pieces of the slaved cavity amplitude closed form, used by the
// dynamics and observables modules.

#include <cmath>

#include "chiral/model.hpp"

namespace chiral::detail {

/// Coefficients multiplying exp(lambda_plus t) and exp(lambda_minus t).
struct TwoExponentials {
  double plus;
  double minus;
};

struct CavityCoefficients {
  TwoExponentials mode_a;
  TwoExponentials mode_b;
};

/// (1 - n/r, 1 + n/r) without cancellation, given r^2 - n^2 in a form that is
/// already exact.
inline TwoExponentials split_ratio(double n, double r, double r2_minus_n2) {
  if (r == 0) return {1.0, 1.0};
  const double one_minus = n > 0 ? r2_minus_n2 / (r * (r + n)) : (r - n) / r;
  const double one_plus = n < 0 ? r2_minus_n2 / (r * (r - n)) : (r + n) / r;
  return {one_minus, one_plus};
}

/// alpha(t) = -i g_q/(2 kappa) [a.plus e^{lambda_plus t} + a.minus e^{lambda_minus t}],
/// beta likewise with mode_b.
inline CavityCoefficients cavity_coefficients(const SystemParams& p) {
  const double q2 = p.g_q() * p.g_q();
  const double d = p.g_a() * p.g_a() - p.g_b() * p.g_b();
  const double r = std::hypot(d, 2.0 * q2);

  const TwoExponentials a = split_ratio(d + 2.0 * q2, r, -4.0 * d * q2);
  const TwoExponentials b = split_ratio(d - 2.0 * q2, r, 4.0 * d * q2);
  // mode a carries (1 - X) on the slow exponential, mode b carries (1 + X).
  return {{a.plus, a.minus}, {b.minus, b.plus}};
}

}  // namespace chiral::detail
