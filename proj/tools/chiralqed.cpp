// chiralqed: plot data and concurrence estimates for the QD + atom ring
// cavity system. Run `chiralqed --help` for the subcommands.

#include <iostream>
#include <map>
#include <optional>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "cli/commands.hpp"

namespace {

struct ParamFlags {
  std::map<std::string, double> values;
  std::optional<std::string> units;

  void add_to(CLI::App& app) {
    static const std::pair<const char*, const char*> keys[] = {
        {"--g-q", "g_q"},         {"--g-a", "g_a"},         {"--g-b", "g_b"},         {"--kappa", "kappa"},
        {"--gamma-q", "gamma_q"}, {"--gamma-a", "gamma_a"}, {"--gamma-b", "gamma_b"}, {"--delta-q", "delta_q"},
        {"--delta-a", "delta_a"}, {"--delta-b", "delta_b"}};
    for (const auto& [flag, key] : keys) {
      const std::string k = key;
      app.add_option_function<double>(flag, [this, k](double v) { values[k] = v; },
                                      "Override " + k + " from the config file");
    }
    app.add_option_function<std::string>("--units", [this](const std::string& u) { units = u; },
                                         "Rate units: kappa (default) or absolute");
  }
};

void report(chiral::ErrorCategory category, const std::string& message) {
  nlohmann::ordered_json err = {{"error", std::string(chiral::to_string(category))}, {"message", message}};
  std::cerr << err.dump() << "\n";
}

}  // namespace

int main(int argc, char** argv) {
  using namespace chiral::cli;

  CLI::App app{"Directional emission and dark-state entanglement in a chiral ring cavity"};
  app.require_subcommand(1);
  app.fallthrough();

  RunConfig config;
  std::string config_path;
  std::string format = "csv";
  std::optional<double> atom_ratio;
  ParamFlags flags;

  app.add_option("--config", config_path, "key=value parameter file (rates in units of kappa by default)");
  app.add_option("--out", config.out, "Output path, '-' for stdout")->capture_default_str();
  app.add_option("--format", format, "Output format: csv or json")->capture_default_str();
  app.add_option("--seed", config.seed, "Random seed")->capture_default_str();
  app.add_option("--n-runs", config.n_runs, "Runs per Monte Carlo record")->capture_default_str();
  app.add_option("--r-a", atom_ratio, "Atom coupling ratio g_b/g_a (default 1/sqrt(45))");
  app.add_option("--grid", config.scan.grid, "Grid resolution per axis for scan-plane")->capture_default_str();
  app.add_option("--workers", config.workers, "Worker threads, 0 = all cores; output does not depend on it");
  flags.add_to(app);

  auto* scan = app.add_subcommand("scan-plane", "D, C, P_a, P_b, P_CD over the (g_q, g_a) plane");
  scan->add_option("--g-q-max", config.scan.g_q_max, "Upper g_q/kappa")->capture_default_str();
  scan->add_option("--g-a-max", config.scan.g_a_max, "Upper g_a/kappa")->capture_default_str();

  auto* curve = app.add_subcommand("curve", "C against D for a sweep of g_q/g_a, with Monte Carlo error bars");
  curve->add_option("--r-min", config.curve.r_min, "Smallest g_q/g_a")->capture_default_str();
  curve->add_option("--r-max", config.curve.r_max, "Largest g_q/g_a")->capture_default_str();
  curve->add_option("--points", config.curve.points, "Number of ratios")->capture_default_str();

  auto* scaling = app.add_subcommand("error-scaling", "Spread of the concurrence estimate against n_runs");
  scaling->add_option("--n-grid", config.scaling.n_grid, "n_runs values")->delimiter(',');
  scaling->add_option("--repetitions", config.scaling.repetitions, "Repetitions per n_runs")
      ->capture_default_str();
  scaling->add_option("--summary", config.scaling.summary_path,
                      "JSON summary path (default <out>.summary.json when --out is a file)");

  auto* simulate = app.add_subcommand("simulate", "One trajectory with every dynamics route side by side");
  simulate->add_option("--horizon", config.simulate.horizon, "Duration in 1/kappa (default 40/|lambda_plus|)");
  simulate->add_option("--dt", config.simulate.dt, "Fixed step, or initial adaptive step")->capture_default_str();
  simulate->add_flag("--adaptive", config.simulate.adaptive, "Use the adaptive Dormand-Prince integrator");
  simulate->add_option("--tolerance", config.simulate.tolerance, "Adaptive tolerance")->capture_default_str();
  simulate->add_option("--sample-interval", config.simulate.sample_interval, "Minimum spacing of output rows");

  auto* estimate = app.add_subcommand("estimate", "Photon counts to a concurrence estimate (JSON)");
  estimate->add_option("--n-a", config.estimate.n_a, "Photons in mode a");
  estimate->add_option("--n-b", config.estimate.n_b, "Photons in mode b");
  estimate->add_option("--n-dark", config.estimate.n_dark, "Runs without a photon");
  estimate->add_option("--record", config.estimate.record_path, "Measurement record JSON to import");

  app.add_subcommand("sample", "Simulated measurement record (JSON) for the configured parameters");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : exit_code(chiral::ErrorCategory::config);
  }

  try {
    config.command = app.get_subcommands().front()->get_name();
    config.format = parse_format(format);
    if (atom_ratio) {
      config.scan.atom_ratio = *atom_ratio;
      config.curve.atom_ratio = *atom_ratio;
      config.estimate.atom_ratio = *atom_ratio;
    }
    config.curve.n_runs = config.n_runs;

    ParamSource file;
    if (!config_path.empty()) file = read_config_file(config_path);
    const ParamSource cli_source{flags.values, flags.units};
    config.params = resolve_params(file, cli_source, default_params(config.command));

    run_command(config);
  } catch (const chiral::Error& e) {
    report(e.category(), e.what());
    return exit_code(e.category());
  } catch (const std::exception& e) {
    std::cerr << nlohmann::ordered_json{{"error", "internal"}, {"message", e.what()}}.dump() << "\n";
    return 1;
  }
  return 0;
}
