#pragma once

#include <complex>
#include <vector>

#include <Eigen/Dense>

#include "chiral/errors.hpp"
#include "chiral/model.hpp"

namespace chiral {

using Complex = std::complex<double>;
using Vector5cd = Eigen::Matrix<Complex, 5, 1>;

/// Slots of the single-excitation amplitude vector.
enum Slot : Eigen::Index {
  kDot = 0,    ///< |E,g,0,0>  quantum dot excited
  kPlus = 1,   ///< |G,+,0,0>  atom in |+>
  kMinus = 2,  ///< |G,-,0,0>  atom in |->
  kModeA = 3,  ///< |G,g,1,0>  one photon in mode a
  kModeB = 4,  ///< |G,g,0,1>  one photon in mode b
};

struct AmplitudeState {
  double t = 0;
  Vector5cd amp = Vector5cd::Zero();

  Complex dot() const { return amp[kDot]; }
  Complex plus() const { return amp[kPlus]; }
  Complex minus() const { return amp[kMinus]; }
  Complex mode_a() const { return amp[kModeA]; }
  Complex mode_b() const { return amp[kModeB]; }

  /// Probability of still holding the excitation.
  double norm2() const { return amp.squaredNorm(); }

  /// QD excited, atom in ground state, cavity empty.
  static AmplitudeState excited_dot();
};

/// Time derivative of the amplitudes under the non-Hermitian single-excitation
/// Hamiltonian: coherent exchange with the cavity, cavity field loss at
/// kappa, emitter loss at gamma/2 and detuning phases.
Vector5cd full_rhs(const Vector5cd& amp, const SystemParams& params);

struct StepControl {
  enum class Mode { fixed, adaptive };

  Mode mode = Mode::fixed;
  /// Fixed step, or the initial step in adaptive mode. Units of 1/kappa.
  double dt = 0.01;
  double abs_tol = 1e-10;
  double rel_tol = 1e-10;
  /// Adaptive mode fails once the controller asks for a step below this.
  double min_dt = 1e-10;
  /// Steps are also capped at 2.5/kappa: longer explicit steps leave the
  /// stability region of the cavity modes and amplify roundoff, which the
  /// error estimate misses while the cavity is empty.
  double max_dt = 1e3;
  /// Minimum spacing between stored samples; 0 keeps every step.
  double sample_interval = 0;

  static StepControl fixed(double dt = 0.01);
  static StepControl adaptive(double tol = 1e-10);
};

struct Trajectory {
  SystemParams params;
  StepControl control;
  std::vector<AmplitudeState> samples;
  /// 2 kappa * integral of |alpha|^2 (resp. |beta|^2) up to each sample time.
  std::vector<double> emitted_a;
  std::vector<double> emitted_b;

  const AmplitudeState& final_state() const { return samples.back(); }
};

/// Raised when the adaptive controller underflows; carries the last accepted
/// state.
class IntegrationError : public Error {
 public:
  IntegrationError(const std::string& what, AmplitudeState last_good)
      : Error(ErrorCategory::integration_failure, what), last_good_(last_good) {}

  const AmplitudeState& last_good() const noexcept { return last_good_; }

 private:
  AmplitudeState last_good_;
};

/// Integrates the full five-amplitude equations from `initial` to
/// initial.t + horizon. Fixed mode uses classic RK4, adaptive mode uses
/// Dormand-Prince 5(4). The last sample sits exactly at the horizon.
Trajectory integrate_full(const SystemParams& params, const AmplitudeState& initial,
                          double horizon, const StepControl& control = {});

/// Emitter-only generator obtained by slaving the cavity amplitudes,
/// alpha = -i (g_q Q + g_a A) / kappa and beta = -i (g_q Q + g_b B) / kappa.
/// Ordered (Q, A, B). Symmetric, negative semidefinite.
struct ReducedGenerator {
  Eigen::Matrix3d matrix;
  /// Ascending, so eigenvalues[2] is the (numerically) zero one.
  Eigen::Vector3d eigenvalues;
  Eigen::Matrix3d eigenvectors;
};

ReducedGenerator reduced_generator(const SystemParams& params);

/// Emitter amplitudes exp(M t) (1, 0, 0) of the eliminated system. Requires
/// zero decay rates and detunings.
Eigen::Vector3d reduced_propagate(const SystemParams& params, double t);

/// Two-exponential closed form for (Q, A, B) with no stationary part.
/// Audit-only: it agrees with reduced_propagate at t = 0 but decays to zero
/// even when a dark state traps population. The second Q coefficient uses
/// (rate_a + rate_b - rate_q) / splitting.
Eigen::Vector3d decaying_emitter_amplitudes(const SystemParams& params, double t);

struct CavityAmplitudes {
  Complex alpha;
  Complex beta;
};

/// Closed-form slaved cavity amplitudes for the QD-excited initial state.
CavityAmplitudes closed_form_cavity(const SystemParams& params, double t);

/// Horizon standing in for t -> infinity: 40 / |lambda_plus|, leaving a
/// transient below exp(-40). Falls back to 40 / kappa when lambda_plus is 0.
double default_horizon(const SystemParams& params);

}  // namespace chiral
