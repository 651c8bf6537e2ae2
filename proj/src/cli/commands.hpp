#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "chiral/inference.hpp"
#include "cli/config.hpp"
#include "cli/output.hpp"

namespace chiral::cli {

struct ScanPlaneSettings {
  double atom_ratio = cesium_atom_ratio();
  int grid = 100;
  double g_q_max = 0.1;
  double g_a_max = 0.1;
};

struct CurveSettings {
  double atom_ratio = cesium_atom_ratio();
  double r_min = 0.01;
  double r_max = 10.0;
  int points = 60;
  std::uint64_t n_runs = 5000;
};

struct ErrorScalingSettings {
  std::vector<std::uint64_t> n_grid = default_scaling_grid();
  std::uint64_t repetitions = 200;
  /// Empty: next to the CSV as <out>.summary.json, or skipped when the CSV
  /// goes to stdout.
  std::string summary_path;
};

struct SimulateSettings {
  std::optional<double> horizon;
  double dt = 0.01;
  bool adaptive = false;
  double tolerance = 1e-10;
  double sample_interval = 0;
};

struct EstimateSettings {
  std::optional<std::uint64_t> n_a, n_b;
  std::uint64_t n_dark = 0;
  std::optional<double> atom_ratio;
  std::string record_path;
};

/// Parameters used when neither a config file nor flags set the couplings:
/// near-peak cesium for error-scaling and sample, otherwise cesium with
/// g_q = 0.01, g_a = 0.05.
SystemParams default_params(const std::string& command);

struct RunConfig {
  std::string command;
  SystemParams params = default_params("");
  std::uint64_t seed = 1;
  std::uint64_t n_runs = 5000;
  std::string out = "-";
  Format format = Format::csv;
  unsigned workers = 0;

  ScanPlaneSettings scan;
  CurveSettings curve;
  ErrorScalingSettings scaling;
  SimulateSettings simulate;
  EstimateSettings estimate;
};

/// Checks resolutions and output locations before any computation starts.
void validate(const RunConfig& config);

/// D, C and emission probabilities over the (g_q/kappa, g_a/kappa) plane
/// (0, max]^2 with g_b = atom_ratio * g_a. Row order: g_q outer, g_a inner.
Table scan_plane(const ScanPlaneSettings& settings, unsigned workers = 0);

/// Concurrence against directionality for log-spaced qd ratios at fixed atom
/// ratio, with one Monte Carlo estimate per ratio. Sorted by D ascending.
Table concurrence_curve(const CurveSettings& settings, std::uint64_t seed, unsigned workers = 0);

Table scaling_table(const ScalingResult& result);

/// One trajectory of the full equations next to the eliminated, decaying
/// closed-form and slaved-cavity routes at the same times.
Table simulate_routes(const SystemParams& params, const SimulateSettings& settings);

/// The estimate command's JSON document, which the import path reads back.
nlohmann::ordered_json estimate_document(const MeasurementRecord& record, double atom_ratio);

/// Runs the configured subcommand and writes its outputs.
void run_command(const RunConfig& config);

/// Exit status for an error category. 0 is success, 1 an unexpected failure.
int exit_code(ErrorCategory category);

}  // namespace chiral::cli
