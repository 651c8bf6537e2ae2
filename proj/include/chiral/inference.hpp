#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "chiral/model.hpp"
#include "chiral/observables.hpp"

namespace chiral {

/// Photon tallies from n_runs single-excitation trials.
struct MeasurementRecord {
  std::uint64_t n_a = 0;
  std::uint64_t n_b = 0;
  std::uint64_t n_dark = 0;
  std::uint64_t n_runs = 0;
  std::uint64_t seed = 0;

  std::uint64_t n_emitting() const { return n_a + n_b; }
  /// Fraction of runs without a photon; estimates the trapping probability.
  double dark_fraction() const;

  friend bool operator==(const MeasurementRecord&, const MeasurementRecord&) = default;
};

/// Builds a record from observed counts, checking that they add up.
MeasurementRecord make_record(std::uint64_t n_a, std::uint64_t n_b, std::uint64_t n_dark,
                              std::uint64_t seed = 0);

/// Runs are grouped into fixed blocks; every block draws its tallies from its
/// own engine keyed by (seed, block index), so the record does not depend on
/// how blocks are spread over threads. Within a block the counts are drawn as
/// binomials, which has the same distribution as tallying runs one by one.
inline constexpr std::uint64_t kRunsPerBlock = 1u << 16;

/// Draws n_runs independent outcomes in {a, b, dark}. `workers` == 0 uses
/// the hardware concurrency; the result is identical for every value.
MeasurementRecord sample_outcomes(const EmissionProbabilities& probs, std::uint64_t n_runs,
                                  std::uint64_t seed, unsigned workers = 0);

struct DirectionalityEstimate {
  double d_hat;
  /// Standard error of the mean of the +-1 outcomes (sample standard
  /// deviation over sqrt(n_a + n_b)).
  double sigma;
};

/// Throws insufficient_counts when fewer than two photons were seen.
DirectionalityEstimate estimate_directionality(const MeasurementRecord& record);

struct ConcurrenceEstimate {
  double d_hat;
  double sigma_d;
  double c_hat;
  double c_low;
  double c_high;
  std::uint64_t n_emitting = 0;

  struct Diagnostics {
    bool clipped_low = false;     ///< d_hat - sigma fell at or below 0
    bool clipped_high = false;    ///< d_hat + sigma exceeded the maximum D
    bool straddles_peak = false;  ///< interval contains the concurrence peak
  } diagnostics;
};

/// Maps (d_hat +- sigma_d) through C(D) at fixed atom ratio. The interval is
/// the image of the clipped D interval, so it reaches 1 whenever that interval
/// contains the peak. Throws out_of_domain when d_hat itself is not in
/// (0, D_max].
ConcurrenceEstimate estimate_concurrence(double d_hat, double sigma_d, double atom_ratio);

ConcurrenceEstimate estimate_concurrence(const MeasurementRecord& record, double atom_ratio);

/// First-order propagation |dC/dD| sigma_d. Misleading near the peak and near
/// D_max; exists to cross-check the interval away from both.
double delta_method_sigma(double d_hat, double sigma_d, double atom_ratio);

/// Analytic dC/dD at fixed atom ratio.
double concurrence_slope(double d, double atom_ratio);

struct ScalingPoint {
  std::uint64_t n_runs;
  double sigma_c;  ///< sample standard deviation of c_hat; NaN with < 2 successes
  double mean_c;
  std::uint64_t successes;
  std::uint64_t failures;
  std::string last_failure;
};

struct ScalingResult {
  std::vector<ScalingPoint> points;
  double exponent;     ///< slope of log sigma_c against log n_runs
  double coefficient;  ///< sigma_c ~ coefficient * n_runs^exponent
  double residual;     ///< RMS residual of the log-log fit
};

/// Repeats sample -> estimate at every n in `n_grid` and measures the spread
/// of the concurrence estimate. Failures are tallied per point.
ScalingResult error_scaling_study(const SystemParams& params, const std::vector<std::uint64_t>& n_grid,
                                  std::uint64_t repetitions, std::uint64_t seed, unsigned workers = 0);

/// Grid used by the error-scaling study when none is given.
std::vector<std::uint64_t> default_scaling_grid();

/// Cesium parameters (g_b = g_a / sqrt(45)) with g_q chosen so the dark-state
/// concurrence equals `target` on the requested branch of C(D).
SystemParams cesium_operating_point(double target = 1.0, Branch branch = Branch::rising, double g_a = 0.05);

/// Concurrence 0.98 on the rising branch: close to the peak while keeping
/// dC/dD nonzero. Exactly at the peak the first-order spread vanishes and the
/// spread of the estimate falls off as 1/n_runs instead of 1/sqrt(n_runs).
inline constexpr double kNearPeakConcurrence = 0.98;

struct CoverageResult {
  std::uint64_t covered = 0;
  std::uint64_t evaluated = 0;
  std::uint64_t excluded = 0;  ///< repetitions whose estimate failed or sat within 2 sigma of the peak
  double true_concurrence = 0;

  double fraction() const { return evaluated ? static_cast<double>(covered) / static_cast<double>(evaluated) : 0.0; }
};

/// Fraction of repetitions whose concurrence interval contains the true
/// value. Repetitions whose D interval at 2 sigma reaches the peak are
/// excluded.
CoverageResult interval_coverage(const SystemParams& params, std::uint64_t n_runs,
                                 std::uint64_t repetitions, std::uint64_t seed, unsigned workers = 0);

/// Deterministic sub-seed for stream (seed, a, b).
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t a, std::uint64_t b = 0);

}  // namespace chiral
