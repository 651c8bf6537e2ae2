#include "chiral/inference.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <optional>
#include <random>
#include <sstream>

#include "chiral/parallel.hpp"

namespace chiral {

namespace {

std::uint32_t lo32(std::uint64_t v) { return static_cast<std::uint32_t>(v); }
std::uint32_t hi32(std::uint64_t v) { return static_cast<std::uint32_t>(v >> 32); }

std::mt19937_64 block_engine(std::uint64_t seed, std::uint64_t block) {
  std::seed_seq seq{lo32(seed), hi32(seed), lo32(block), hi32(block)};
  return std::mt19937_64(seq);
}

void validate_probabilities(const EmissionProbabilities& p) {
  for (double v : {p.p_a, p.p_b, p.p_dark}) {
    if (!(v >= 0) || !(v <= 1)) {
      throw Error(ErrorCategory::invalid_parameter, "emission probabilities must lie in [0, 1]");
    }
  }
  if (std::abs(p.p_a + p.p_b + p.p_dark - 1.0) > 1e-9) {
    throw Error(ErrorCategory::invalid_parameter, "emission probabilities must sum to 1");
  }
}

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

}  // namespace

double MeasurementRecord::dark_fraction() const {
  return n_runs ? static_cast<double>(n_dark) / static_cast<double>(n_runs) : kNaN;
}

MeasurementRecord make_record(std::uint64_t n_a, std::uint64_t n_b, std::uint64_t n_dark, std::uint64_t seed) {
  MeasurementRecord r{n_a, n_b, n_dark, n_a + n_b + n_dark, seed};
  if (r.n_runs < n_a || r.n_runs < n_b) {
    throw Error(ErrorCategory::invalid_parameter, "photon counts overflow");
  }
  return r;
}

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t a, std::uint64_t b) {
  std::seed_seq seq{lo32(seed), hi32(seed), lo32(a), hi32(a), lo32(b), hi32(b)};
  std::array<std::uint32_t, 2> out{};
  seq.generate(out.begin(), out.end());
  return (static_cast<std::uint64_t>(out[1]) << 32) | out[0];
}

MeasurementRecord sample_outcomes(const EmissionProbabilities& probs, std::uint64_t n_runs,
                                  std::uint64_t seed, unsigned workers) {
  validate_probabilities(probs);
  if (n_runs < 1) throw Error(ErrorCategory::invalid_parameter, "n_runs must be >= 1");

  const std::uint64_t blocks = (n_runs + kRunsPerBlock - 1) / kRunsPerBlock;
  std::vector<std::array<std::uint64_t, 2>> tallies(blocks);
  // Given n_a, the remaining runs split between b and dark with p_b / (1 - p_a).
  const double share_b = probs.p_a < 1 ? std::clamp(probs.p_b / (1.0 - probs.p_a), 0.0, 1.0) : 0.0;

  parallel_for(blocks, workers, [&](std::size_t block) {
    auto engine = block_engine(seed, block);
    const std::uint64_t begin = block * kRunsPerBlock;
    const std::uint64_t runs = std::min(n_runs, begin + kRunsPerBlock) - begin;
    const std::uint64_t a = std::binomial_distribution<std::uint64_t>(runs, probs.p_a)(engine);
    const std::uint64_t b = std::binomial_distribution<std::uint64_t>(runs - a, share_b)(engine);
    tallies[block] = {a, b};
  });

  MeasurementRecord record;
  record.n_runs = n_runs;
  record.seed = seed;
  for (const auto& t : tallies) {
    record.n_a += t[0];
    record.n_b += t[1];
  }
  record.n_dark = n_runs - record.n_a - record.n_b;
  return record;
}

DirectionalityEstimate estimate_directionality(const MeasurementRecord& record) {
  if (record.n_a + record.n_b + record.n_dark != record.n_runs) {
    throw Error(ErrorCategory::invalid_parameter, "record counts do not add up to n_runs");
  }
  const std::uint64_t n = record.n_emitting();
  if (n < 2) {
    std::ostringstream msg;
    msg << "need at least 2 detected photons to estimate the directionality, got " << n;
    throw Error(ErrorCategory::insufficient_counts, msg.str());
  }
  const double nd = static_cast<double>(n);
  const double na = static_cast<double>(record.n_a);
  const double nb = static_cast<double>(record.n_b);
  // Sample variance of the +-1 outcomes: 4 n_a n_b / (n (n - 1)).
  const double variance = 4.0 * na * nb / (nd * (nd - 1.0));
  return {(nb - na) / nd, std::sqrt(variance / nd)};
}

ConcurrenceEstimate estimate_concurrence(double d_hat, double sigma_d, double atom_ratio) {
  if (!(sigma_d >= 0) || !std::isfinite(sigma_d)) {
    throw Error(ErrorCategory::invalid_parameter, "sigma_d must be finite and >= 0");
  }
  ConcurrenceEstimate est{};
  est.d_hat = d_hat;
  est.sigma_d = sigma_d;
  est.c_hat = concurrence_vs_directionality(d_hat, atom_ratio);

  const double d_max = max_directionality(atom_ratio);
  const double lo = d_hat - sigma_d;
  const double hi = d_hat + sigma_d;
  double c_at_lo = 0;
  double c_at_hi = 0;
  if (lo <= 0) {
    est.diagnostics.clipped_low = true;
  } else {
    c_at_lo = concurrence_vs_directionality(std::min(lo, d_max), atom_ratio);
  }
  if (hi > d_max) {
    est.diagnostics.clipped_high = true;
  } else {
    c_at_hi = concurrence_vs_directionality(hi, atom_ratio);
  }

  const double d_peak = peak_directionality(atom_ratio);
  est.diagnostics.straddles_peak = lo <= d_peak && d_peak <= hi;
  est.c_low = std::clamp(std::min({c_at_lo, c_at_hi, est.c_hat}), 0.0, 1.0);
  est.c_high = est.diagnostics.straddles_peak
                   ? 1.0
                   : std::clamp(std::max({c_at_lo, c_at_hi, est.c_hat}), 0.0, 1.0);
  return est;
}

ConcurrenceEstimate estimate_concurrence(const MeasurementRecord& record, double atom_ratio) {
  const DirectionalityEstimate d = estimate_directionality(record);
  ConcurrenceEstimate est = estimate_concurrence(d.d_hat, d.sigma, atom_ratio);
  est.n_emitting = record.n_emitting();
  return est;
}

double concurrence_slope(double d, double atom_ratio) {
  const double r = ratio_from_directionality(d, atom_ratio);
  if (r == 0) return -std::numeric_limits<double>::infinity();
  const double ra = atom_ratio;
  const double k = 2.0 * std::sqrt(1.0 + ra * ra);
  const double u = 1.0 / ra + ra;
  const double denom = r * u + ra / r;
  const double dc_dr = -k * (u - ra / (r * r)) / (denom * denom);
  const double dr_dd = -(1.0 - ra * ra) / (4.0 * r * d * d);
  return dc_dr * dr_dd;
}

double delta_method_sigma(double d_hat, double sigma_d, double atom_ratio) {
  return std::abs(concurrence_slope(d_hat, atom_ratio)) * sigma_d;
}

std::vector<std::uint64_t> default_scaling_grid() { return {10'000, 100'000, 1'000'000, 10'000'000}; }

SystemParams cesium_operating_point(double target, Branch branch, double g_a) {
  const double ra = cesium_atom_ratio();
  const double r = ratio_for_concurrence(target, ra, branch);
  return params_from_ratios({r, ra}, g_a);
}

namespace {

struct Attempt {
  std::optional<double> c_hat;
  std::string failure;
};

}  // namespace

ScalingResult error_scaling_study(const SystemParams& params, const std::vector<std::uint64_t>& n_grid,
                                  std::uint64_t repetitions, std::uint64_t seed, unsigned workers) {
  if (n_grid.empty()) throw Error(ErrorCategory::invalid_parameter, "n_grid must not be empty");
  if (repetitions < 1) throw Error(ErrorCategory::invalid_parameter, "repetitions must be >= 1");
  std::vector<std::uint64_t> grid = n_grid;
  std::sort(grid.begin(), grid.end());
  grid.erase(std::unique(grid.begin(), grid.end()), grid.end());
  if (grid.front() < 100) throw Error(ErrorCategory::invalid_parameter, "every n_runs in the grid must be >= 100");

  const EmissionProbabilities probs = emission_probabilities(params);
  const double atom_ratio = ratios_of(params).atom_ratio;

  std::vector<Attempt> attempts(grid.size() * repetitions);
  parallel_for(attempts.size(), workers, [&](std::size_t k) {
    const std::size_t point = k / repetitions;
    const std::size_t rep = k % repetitions;
    try {
      const MeasurementRecord record = sample_outcomes(probs, grid[point], derive_seed(seed, point, rep), 1);
      attempts[k].c_hat = estimate_concurrence(record, atom_ratio).c_hat;
    } catch (const Error& e) {
      attempts[k].failure = e.what();
    }
  });

  ScalingResult result{{}, kNaN, kNaN, kNaN};
  std::vector<double> xs, ys;
  for (std::size_t point = 0; point < grid.size(); ++point) {
    ScalingPoint sp{grid[point], kNaN, kNaN, 0, 0, {}};
    double sum = 0, sum2 = 0;
    for (std::size_t rep = 0; rep < repetitions; ++rep) {
      const Attempt& a = attempts[point * repetitions + rep];
      if (a.c_hat) {
        ++sp.successes;
        sum += *a.c_hat;
      } else {
        ++sp.failures;
        sp.last_failure = a.failure;
      }
    }
    if (sp.successes > 0) sp.mean_c = sum / static_cast<double>(sp.successes);
    if (sp.successes >= 2) {
      for (std::size_t rep = 0; rep < repetitions; ++rep) {
        const Attempt& a = attempts[point * repetitions + rep];
        if (a.c_hat) sum2 += (*a.c_hat - sp.mean_c) * (*a.c_hat - sp.mean_c);
      }
      sp.sigma_c = std::sqrt(sum2 / static_cast<double>(sp.successes - 1));
    }
    if (std::isfinite(sp.sigma_c) && sp.sigma_c > 0) {
      xs.push_back(std::log(static_cast<double>(sp.n_runs)));
      ys.push_back(std::log(sp.sigma_c));
    }
    result.points.push_back(std::move(sp));
  }

  if (xs.size() >= 2) {
    const Eigen::Map<const Eigen::VectorXd> x(xs.data(), static_cast<Eigen::Index>(xs.size()));
    const Eigen::Map<const Eigen::VectorXd> y(ys.data(), static_cast<Eigen::Index>(ys.size()));
    Eigen::MatrixXd design(x.size(), 2);
    design.col(0) = x;
    design.col(1).setOnes();
    const Eigen::Vector2d fit = design.colPivHouseholderQr().solve(y);
    result.exponent = fit[0];
    result.coefficient = std::exp(fit[1]);
    const Eigen::VectorXd resid = y - design * fit;
    result.residual = std::sqrt(resid.squaredNorm() / static_cast<double>(resid.size()));
  }
  return result;
}

CoverageResult interval_coverage(const SystemParams& params, std::uint64_t n_runs, std::uint64_t repetitions,
                                 std::uint64_t seed, unsigned workers) {
  const EmissionProbabilities probs = emission_probabilities(params);
  const double atom_ratio = ratios_of(params).atom_ratio;
  const double d_peak = peak_directionality(atom_ratio);

  CoverageResult out;
  out.true_concurrence = concurrence_from_couplings(params);
  // 0 = excluded, 1 = missed, 2 = covered
  std::vector<int> verdict(repetitions, 0);
  parallel_for(repetitions, workers, [&](std::size_t rep) {
    try {
      const MeasurementRecord record = sample_outcomes(probs, n_runs, derive_seed(seed, rep), 1);
      const DirectionalityEstimate d = estimate_directionality(record);
      if (std::abs(d.d_hat - d_peak) <= 2.0 * d.sigma) return;
      const ConcurrenceEstimate c = estimate_concurrence(d.d_hat, d.sigma, atom_ratio);
      verdict[rep] = (c.c_low <= out.true_concurrence && out.true_concurrence <= c.c_high) ? 2 : 1;
    } catch (const Error&) {
    }
  });
  for (int v : verdict) {
    if (v == 0) {
      ++out.excluded;
    } else {
      ++out.evaluated;
      if (v == 2) ++out.covered;
    }
  }
  return out;
}

}  // namespace chiral
