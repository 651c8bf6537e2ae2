#include "chiral/dynamics.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <sstream>

#include <boost/numeric/odeint.hpp>

#include "closed_form.hpp"

namespace chiral {

namespace odeint = boost::numeric::odeint;

AmplitudeState AmplitudeState::excited_dot() {
  AmplitudeState s;
  s.amp[kDot] = 1.0;
  return s;
}

StepControl StepControl::fixed(double dt) {
  StepControl c;
  c.mode = Mode::fixed;
  c.dt = dt;
  return c;
}

StepControl StepControl::adaptive(double tol) {
  StepControl c;
  c.mode = Mode::adaptive;
  c.abs_tol = tol;
  c.rel_tol = tol;
  return c;
}

Vector5cd full_rhs(const Vector5cd& x, const SystemParams& p) {
  const Complex i{0.0, 1.0};
  Vector5cd dx;
  dx[kDot] = -Complex(p.gamma_q() / 2, p.delta_q()) * x[kDot] - i * p.g_q() * (x[kModeA] + x[kModeB]);
  dx[kPlus] = -Complex(p.gamma_a() / 2, p.delta_a()) * x[kPlus] - i * p.g_a() * x[kModeA];
  dx[kMinus] = -Complex(p.gamma_b() / 2, p.delta_b()) * x[kMinus] - i * p.g_b() * x[kModeB];
  dx[kModeA] = -p.kappa() * x[kModeA] - i * (p.g_q() * x[kDot] + p.g_a() * x[kPlus]);
  dx[kModeB] = -p.kappa() * x[kModeB] - i * (p.g_q() * x[kDot] + p.g_b() * x[kMinus]);
  return dx;
}

namespace {

// Dormand-Prince is stable on the negative real axis down to about -3.3.
constexpr double kStableStep = 2.5;

// Five amplitudes followed by the two emitted-probability accumulators.
using OdeState = std::array<Complex, 7>;

struct FullSystem {
  const SystemParams& params;

  void operator()(const OdeState& x, OdeState& dxdt, double /*t*/) const {
    Vector5cd amp;
    for (int k = 0; k < 5; ++k) amp[k] = x[k];
    const Vector5cd d = full_rhs(amp, params);
    for (int k = 0; k < 5; ++k) dxdt[k] = d[k];
    dxdt[5] = 2.0 * params.kappa() * std::norm(x[kModeA]);
    dxdt[6] = 2.0 * params.kappa() * std::norm(x[kModeB]);
  }
};

class Recorder {
 public:
  Recorder(Trajectory& traj, double interval) : traj_(traj), interval_(interval) {}

  void record(const OdeState& x, double t, bool force) {
    if (!force && !traj_.samples.empty() && t - traj_.samples.back().t < interval_) return;
    AmplitudeState s;
    s.t = t;
    for (int k = 0; k < 5; ++k) s.amp[k] = x[k];
    traj_.samples.push_back(s);
    traj_.emitted_a.push_back(x[5].real());
    traj_.emitted_b.push_back(x[6].real());
  }

  // Ensures the final state is the last sample even if it was throttled.
  void finish(const OdeState& x, double t) {
    if (traj_.samples.back().t != t) record(x, t, true);
  }

 private:
  Trajectory& traj_;
  double interval_;
};

AmplitudeState to_amplitude_state(const OdeState& x, double t) {
  AmplitudeState s;
  s.t = t;
  for (int k = 0; k < 5; ++k) s.amp[k] = x[k];
  return s;
}

}  // namespace

Trajectory integrate_full(const SystemParams& params, const AmplitudeState& initial,
                          double horizon, const StepControl& control) {
  if (!(horizon > 0) || !std::isfinite(horizon)) {
    throw Error(ErrorCategory::invalid_parameter, "integration horizon must be positive and finite");
  }
  if (!(control.dt > 0)) {
    throw Error(ErrorCategory::invalid_parameter, "step size must be positive");
  }

  Trajectory traj{params, control, {}, {}, {}};
  Recorder recorder(traj, control.sample_interval);
  const FullSystem system{params};

  OdeState x{};
  for (int k = 0; k < 5; ++k) x[k] = initial.amp[k];
  double t = initial.t;
  const double t_end = initial.t + horizon;
  recorder.record(x, t, true);

  if (control.mode == StepControl::Mode::fixed) {
    odeint::runge_kutta4<OdeState> stepper;
    const auto steps = static_cast<long long>(std::ceil(horizon / control.dt - 1e-9));
    for (long long n = 0; n < steps; ++n) {
      const double next = (n + 1 == steps) ? t_end : initial.t + static_cast<double>(n + 1) * control.dt;
      stepper.do_step(system, x, t, next - t);
      t = next;
      recorder.record(x, t, false);
    }
  } else {
    auto stepper = odeint::make_controlled<odeint::runge_kutta_dopri5<OdeState>>(control.abs_tol,
                                                                                 control.rel_tol);
    const double max_dt = std::min(control.max_dt, kStableStep / params.kappa());
    double dt = std::min(control.dt, max_dt);
    while (t < t_end) {
      const bool last = t_end - t <= dt;
      double step = last ? t_end - t : dt;
      const double t_before = t;
      if (stepper.try_step(system, x, t, step) == odeint::success) {
        if (last) t = t_end;
        recorder.record(x, t, false);
        dt = std::min(step, max_dt);
      } else {
        dt = step;
        if (dt < control.min_dt) {
          std::ostringstream msg;
          msg << "step size underflow at t = " << t_before << " (dt = " << dt << ")";
          throw IntegrationError(msg.str(), to_amplitude_state(x, t_before));
        }
      }
    }
  }
  recorder.finish(x, t);
  return traj;
}

ReducedGenerator reduced_generator(const SystemParams& params) {
  const EffectiveRates r = derive_effective_rates(params);
  const double qa = std::sqrt(r.rate_q * r.rate_a / 2.0);
  const double qb = std::sqrt(r.rate_q * r.rate_b / 2.0);

  ReducedGenerator gen;
  gen.matrix << r.rate_q, qa, qb,
                qa, r.rate_a, 0.0,
                qb, 0.0, r.rate_b;
  gen.matrix = -gen.matrix;

  Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> solver(gen.matrix);
  gen.eigenvalues = solver.eigenvalues();
  gen.eigenvectors = solver.eigenvectors();
  return gen;
}

namespace {

void require_ideal(const SystemParams& params, const char* what) {
  if (!params.is_ideal()) {
    throw Error(ErrorCategory::unsupported_regime,
                std::string(what) + " requires zero decay rates and detunings");
  }
}

}  // namespace

Eigen::Vector3d reduced_propagate(const SystemParams& params, double t) {
  require_ideal(params, "reduced propagation");
  const ReducedGenerator gen = reduced_generator(params);
  const Eigen::Vector3d weights = gen.eigenvectors.row(0).transpose();
  const Eigen::Vector3d decay = (gen.eigenvalues * t).array().exp().matrix();
  return gen.eigenvectors * decay.cwiseProduct(weights);
}

Eigen::Vector3d decaying_emitter_amplitudes(const SystemParams& params, double t) {
  require_ideal(params, "the decaying closed form");
  const EffectiveRates r = derive_effective_rates(params);
  if (r.splitting == 0) {
    throw Error(ErrorCategory::undefined_quantity,
                "decaying closed form is singular when rate_q = 0 and rate_a = rate_b");
  }
  const double e_plus = std::exp(r.lambda_plus * t);
  const double e_minus = std::exp(r.lambda_minus * t);
  const double x = (r.rate_a + r.rate_b - r.rate_q) / r.splitting;
  const double s2 = 2.0 * r.splitting * r.splitting;

  Eigen::Vector3d out;
  out[0] = 0.5 * (1.0 + x) * e_plus + 0.5 * (1.0 - x) * e_minus;
  out[1] = std::sqrt(r.rate_a * r.rate_q / s2) * (e_minus - e_plus);
  out[2] = std::sqrt(r.rate_b * r.rate_q / s2) * (e_minus - e_plus);
  return out;
}

CavityAmplitudes closed_form_cavity(const SystemParams& params, double t) {
  require_ideal(params, "the cavity closed form");
  const EffectiveRates r = derive_effective_rates(params);
  const detail::CavityCoefficients c = detail::cavity_coefficients(params);
  const double e_plus = std::exp(r.lambda_plus * t);
  const double e_minus = std::exp(r.lambda_minus * t);
  const Complex prefactor{0.0, -params.g_q() / (2.0 * params.kappa())};
  return {prefactor * (c.mode_a.plus * e_plus + c.mode_a.minus * e_minus),
          prefactor * (c.mode_b.plus * e_plus + c.mode_b.minus * e_minus)};
}

double default_horizon(const SystemParams& params) {
  const double floor = 40.0 / params.kappa();
  const double slow = derive_effective_rates(params).lambda_plus;
  if (slow == 0) return floor;
  return std::max(floor, 40.0 / std::abs(slow));
}

}  // namespace chiral
