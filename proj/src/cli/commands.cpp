#include "cli/commands.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <numeric>
#include <sstream>

#include "chiral/dynamics.hpp"
#include "chiral/observables.hpp"
#include "chiral/parallel.hpp"

namespace chiral::cli {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

[[noreturn]] void config_error(const std::string& what) { throw Error(ErrorCategory::config, what); }

}  // namespace

SystemParams default_params(const std::string& command) {
  if (command == "error-scaling" || command == "sample") {
    return cesium_operating_point(kNearPeakConcurrence);
  }
  const double g_a = 0.05;
  return SystemParams(0.01, g_a, g_a * cesium_atom_ratio());
}

void validate(const RunConfig& c) {
  if (c.command == "scan-plane") {
    if (c.scan.grid < 2) config_error("--grid must be >= 2");
    if (!(c.scan.g_q_max > 0) || !(c.scan.g_a_max > 0)) config_error("scan bounds must be positive");
  } else if (c.command == "curve") {
    if (c.curve.points < 2) config_error("--points must be >= 2");
    if (!(c.curve.r_min > 0) || !(c.curve.r_max > c.curve.r_min)) config_error("need 0 < --r-min < --r-max");
    if (c.curve.n_runs < 1) config_error("--n-runs must be >= 1");
  } else if (c.command == "error-scaling") {
    if (c.scaling.n_grid.empty()) config_error("--n-grid must not be empty");
    if (c.scaling.repetitions < 2) config_error("--repetitions must be >= 2");
    ensure_writable(c.scaling.summary_path);
  } else if (c.command == "simulate") {
    if (c.simulate.horizon && !(*c.simulate.horizon > 0)) config_error("--horizon must be positive");
    if (!(c.simulate.dt > 0)) config_error("--dt must be positive");
  } else if (c.command == "estimate") {
    if (c.estimate.record_path.empty() && (!c.estimate.n_a || !c.estimate.n_b)) {
      config_error("estimate needs --n-a and --n-b, or --record");
    }
  } else if (c.command == "sample") {
    if (c.n_runs < 1) config_error("--n-runs must be >= 1");
  } else {
    config_error("unknown command '" + c.command + "'");
  }
  ensure_writable(c.out);
}

Table scan_plane(const ScanPlaneSettings& s, unsigned workers) {
  Table table{{"g_q_over_kappa", "g_a_over_kappa", "g_b_over_kappa", "D", "C", "P_a", "P_b", "P_CD"}, {}};
  const auto n = static_cast<std::size_t>(s.grid);
  table.rows.resize(n * n);
  parallel_for(n * n, workers, [&](std::size_t cell) {
    const std::size_t i = cell / n;
    const std::size_t j = cell % n;
    const double g_q = s.g_q_max * static_cast<double>(i + 1) / static_cast<double>(n);
    const double g_a = s.g_a_max * static_cast<double>(j + 1) / static_cast<double>(n);
    const SystemParams p(g_q, g_a, s.atom_ratio * g_a);
    const EmissionProbabilities e = emission_probabilities(p);
    table.rows[cell] = {p.g_q(), p.g_a(), p.g_b(), directionality(p), concurrence_from_couplings(p),
                        e.p_a, e.p_b, e.p_dark};
  });
  return table;
}

Table concurrence_curve(const CurveSettings& s, std::uint64_t seed, unsigned workers) {
  Table table{{"r", "D", "C", "D_hat", "sigma_D", "C_hat", "C_low", "C_high", "dark_fraction"}, {}};
  const auto n = static_cast<std::size_t>(s.points);
  table.rows.resize(n);
  const double log_lo = std::log(s.r_min);
  const double log_step = (std::log(s.r_max) - log_lo) / static_cast<double>(n - 1);
  parallel_for(n, workers, [&](std::size_t k) {
    const double r = k + 1 == n ? s.r_max : std::exp(log_lo + log_step * static_cast<double>(k));
    const SystemParams p = params_from_ratios({r, s.atom_ratio}, 0.05);
    const MeasurementRecord record = sample_outcomes(emission_probabilities(p), s.n_runs, derive_seed(seed, k), 1);
    std::vector<double> row = {r, directionality_from_ratios(r, s.atom_ratio), concurrence_from_ratios(r, s.atom_ratio),
                               kNaN, kNaN, kNaN, kNaN, kNaN, record.dark_fraction()};
    try {
      const DirectionalityEstimate d = estimate_directionality(record);
      row[3] = d.d_hat;
      row[4] = d.sigma;
      const ConcurrenceEstimate c = estimate_concurrence(d.d_hat, d.sigma, s.atom_ratio);
      row[5] = c.c_hat;
      row[6] = c.c_low;
      row[7] = c.c_high;
    } catch (const Error&) {
      // Estimate columns stay empty for this ratio.
    }
    table.rows[k] = std::move(row);
  });
  std::stable_sort(table.rows.begin(), table.rows.end(),
                   [](const auto& x, const auto& y) { return x[1] < y[1]; });
  return table;
}

Table scaling_table(const ScalingResult& result) {
  Table table{{"n_runs", "sigma_C"}, {}};
  for (const auto& p : result.points) table.rows.push_back({static_cast<double>(p.n_runs), p.sigma_c});
  return table;
}

Table simulate_routes(const SystemParams& params, const SimulateSettings& s) {
  StepControl control = s.adaptive ? StepControl::adaptive(s.tolerance) : StepControl::fixed(s.dt);
  control.dt = s.dt;
  control.sample_interval = s.sample_interval;
  const double horizon = s.horizon.value_or(default_horizon(params));
  const Trajectory traj = integrate_full(params, AmplitudeState::excited_dot(), horizon, control);

  Table table{{"t", "re_Q", "im_Q", "re_A", "im_A", "re_B", "im_B", "re_alpha", "im_alpha", "re_beta", "im_beta",
               "norm2", "emitted_a", "emitted_b", "reduced_Q", "reduced_A", "reduced_B", "decaying_Q", "decaying_A",
               "decaying_B", "re_alpha_closed", "im_alpha_closed", "re_beta_closed", "im_beta_closed"},
              {}};
  const bool ideal = params.is_ideal();
  const bool decaying_defined = ideal && derive_effective_rates(params).splitting > 0;
  table.rows.reserve(traj.samples.size());
  for (std::size_t k = 0; k < traj.samples.size(); ++k) {
    const AmplitudeState& st = traj.samples[k];
    std::vector<double> row = {st.t};
    for (int slot = 0; slot < 5; ++slot) {
      row.push_back(st.amp[slot].real());
      row.push_back(st.amp[slot].imag());
    }
    row.push_back(st.norm2());
    row.push_back(traj.emitted_a[k]);
    row.push_back(traj.emitted_b[k]);
    if (ideal) {
      const Eigen::Vector3d reduced = reduced_propagate(params, st.t);
      row.insert(row.end(), {reduced[0], reduced[1], reduced[2]});
    } else {
      row.insert(row.end(), {kNaN, kNaN, kNaN});
    }
    if (decaying_defined) {
      const Eigen::Vector3d dec = decaying_emitter_amplitudes(params, st.t);
      row.insert(row.end(), {dec[0], dec[1], dec[2]});
    } else {
      row.insert(row.end(), {kNaN, kNaN, kNaN});
    }
    if (ideal) {
      const CavityAmplitudes cav = closed_form_cavity(params, st.t);
      row.insert(row.end(), {cav.alpha.real(), cav.alpha.imag(), cav.beta.real(), cav.beta.imag()});
    } else {
      row.insert(row.end(), {kNaN, kNaN, kNaN, kNaN});
    }
    table.rows.push_back(std::move(row));
  }
  return table;
}

nlohmann::ordered_json estimate_document(const MeasurementRecord& record, double atom_ratio) {
  const ConcurrenceEstimate est = estimate_concurrence(record, atom_ratio);
  nlohmann::ordered_json estimate = to_json(est);
  estimate["dark_fraction"] = record.dark_fraction();
  const double delta = delta_method_sigma(est.d_hat, est.sigma_d, atom_ratio);
  estimate["delta_method_sigma"] = std::isfinite(delta) ? nlohmann::ordered_json(delta) : nullptr;
  return {{"schema_version", kSchemaVersion},
          {"record", to_json(record)},
          {"atom_ratio", atom_ratio},
          {"estimate", std::move(estimate)}};
}

namespace {

void run_estimate(const RunConfig& c) {
  MeasurementRecord record;
  std::optional<double> atom_ratio = c.estimate.atom_ratio;
  if (!c.estimate.record_path.empty()) {
    std::ifstream in(c.estimate.record_path);
    if (!in) throw Error(ErrorCategory::io, "cannot read record file " + c.estimate.record_path);
    nlohmann::json doc;
    try {
      doc = nlohmann::json::parse(in);
    } catch (const nlohmann::json::exception& e) {
      throw Error(ErrorCategory::config, c.estimate.record_path + ": " + e.what());
    }
    record = record_from_json(doc);
    if (!atom_ratio && doc.contains("atom_ratio")) atom_ratio = doc.at("atom_ratio").get<double>();
  } else {
    record = make_record(*c.estimate.n_a, *c.estimate.n_b, c.estimate.n_dark);
  }
  if (!atom_ratio) config_error("estimate needs --r-a (or an atom_ratio field in the record file)");
  write_text(c.out, estimate_document(record, *atom_ratio).dump(2) + "\n");
}

void run_sample(const RunConfig& c) {
  const EmissionProbabilities probs = emission_probabilities(c.params);
  const MeasurementRecord record = sample_outcomes(probs, c.n_runs, c.seed, c.workers);
  nlohmann::ordered_json doc = {{"schema_version", kSchemaVersion},
                                {"record", to_json(record)},
                                {"atom_ratio", ratios_of(c.params).atom_ratio},
                                {"probabilities", {{"p_a", probs.p_a}, {"p_b", probs.p_b}, {"p_dark", probs.p_dark}}}};
  write_text(c.out, doc.dump(2) + "\n");
}

}  // namespace

void run_command(const RunConfig& c) {
  validate(c);
  if (c.command == "scan-plane") {
    write_text(c.out, render(scan_plane(c.scan, c.workers), c.format));
  } else if (c.command == "curve") {
    write_text(c.out, render(concurrence_curve(c.curve, c.seed, c.workers), c.format));
  } else if (c.command == "error-scaling") {
    const ScalingResult result =
        error_scaling_study(c.params, c.scaling.n_grid, c.scaling.repetitions, c.seed, c.workers);
    const std::string summary = to_json(result).dump(2) + "\n";
    if (c.format == Format::json) {
      write_text(c.out, summary);
    } else {
      write_text(c.out, render(scaling_table(result), Format::csv));
      std::string summary_path = c.scaling.summary_path;
      if (summary_path.empty() && c.out != "-") summary_path = c.out + ".summary.json";
      if (!summary_path.empty()) write_text(summary_path, summary);
    }
  } else if (c.command == "simulate") {
    write_text(c.out, render(simulate_routes(c.params, c.simulate), c.format));
  } else if (c.command == "estimate") {
    run_estimate(c);
  } else if (c.command == "sample") {
    run_sample(c);
  }
}

int exit_code(ErrorCategory category) {
  switch (category) {
    case ErrorCategory::config: return 2;
    case ErrorCategory::invalid_parameter: return 3;
    case ErrorCategory::undefined_quantity: return 4;
    case ErrorCategory::no_dark_state: return 5;
    case ErrorCategory::unsupported_regime: return 6;
    case ErrorCategory::out_of_domain: return 7;
    case ErrorCategory::integration_failure: return 8;
    case ErrorCategory::insufficient_counts: return 9;
    case ErrorCategory::io: return 10;
  }
  return 1;
}

}  // namespace chiral::cli
