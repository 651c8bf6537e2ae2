#include "cli/config.hpp"

#include <array>
#include <charconv>
#include <fstream>
#include <sstream>

namespace chiral::cli {

namespace {

constexpr std::array<std::string_view, 10> kRateKeys = {
    "g_q", "g_a", "g_b", "kappa", "gamma_q", "gamma_a", "gamma_b", "delta_q", "delta_a", "delta_b"};

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

[[noreturn]] void fail(std::string_view source, std::size_t line, const std::string& what) {
  std::ostringstream msg;
  msg << source << ":" << line << ": " << what;
  throw Error(ErrorCategory::config, msg.str());
}

void check_units(std::string_view units, std::string_view where) {
  if (units != "kappa" && units != "absolute") {
    throw Error(ErrorCategory::config,
                std::string(where) + ": units must be 'kappa' or 'absolute', got '" + std::string(units) + "'");
  }
}

}  // namespace

bool is_known_key(std::string_view key) {
  if (key == "units") return true;
  for (auto k : kRateKeys) {
    if (k == key) return true;
  }
  return false;
}

ParamSource parse_config_text(std::string_view text, std::string_view source_name) {
  ParamSource out;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const auto eol = text.find('\n', pos);
    const std::string_view raw = text.substr(pos, eol == std::string_view::npos ? text.size() - pos : eol - pos);
    pos = eol == std::string_view::npos ? text.size() + 1 : eol + 1;
    ++line_no;

    const std::string_view line = trim(raw);
    if (line.empty() || line.front() == '#') continue;
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) fail(source_name, line_no, "expected key=value");
    const std::string_view key = trim(line.substr(0, eq));
    const std::string_view value = trim(line.substr(eq + 1));
    if (key.empty()) fail(source_name, line_no, "missing key");
    if (value.empty()) fail(source_name, line_no, "missing value for '" + std::string(key) + "'");
    if (!is_known_key(key)) fail(source_name, line_no, "unknown key '" + std::string(key) + "'");

    if (key == "units") {
      check_units(value, source_name);
      out.units = std::string(value);
      continue;
    }
    double parsed = 0;
    const auto [end, ec] = std::from_chars(value.data(), value.data() + value.size(), parsed);
    if (ec != std::errc() || end != value.data() + value.size()) {
      fail(source_name, line_no, "value '" + std::string(value) + "' for '" + std::string(key) + "' is not a number");
    }
    if (!out.values.emplace(std::string(key), parsed).second) {
      fail(source_name, line_no, "duplicate key '" + std::string(key) + "'");
    }
  }
  return out;
}

ParamSource read_config_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCategory::io, "cannot read config file " + path.string());
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return parse_config_text(buffer.str(), path.string());
}

SystemParams resolve_params(const ParamSource& file, const ParamSource& flags,
                            const std::optional<SystemParams>& fallback) {
  if (file.units) check_units(*file.units, "config file");
  if (flags.units) check_units(*flags.units, "--units");
  if (file.units && flags.units && *file.units != *flags.units) {
    throw Error(ErrorCategory::config,
                "conflicting units: config file says '" + *file.units + "', flag says '" + *flags.units + "'");
  }
  const std::string units = flags.units ? *flags.units : file.units.value_or("kappa");

  std::map<std::string, double> merged = file.values;
  for (const auto& [k, v] : flags.values) merged[k] = v;

  auto lookup = [&](const std::string& key, std::optional<double> dflt) -> double {
    if (auto it = merged.find(key); it != merged.end()) return it->second;
    if (dflt) return *dflt;
    throw Error(ErrorCategory::config, "missing required parameter '" + key + "'");
  };

  std::optional<double> fq, fa, fb;
  if (fallback) {
    fq = fallback->g_q() / fallback->kappa();
    fa = fallback->g_a() / fallback->kappa();
    fb = fallback->g_b() / fallback->kappa();
  }

  double kappa = 1.0;
  if (units == "kappa") {
    if (auto it = merged.find("kappa"); it != merged.end() && it->second != 1.0) {
      throw Error(ErrorCategory::config,
                  "conflicting units: rates are in units of kappa but kappa is set to a value other than 1 "
                  "(use units=absolute)");
    }
  } else {
    kappa = lookup("kappa", std::nullopt);
    if (!(kappa > 0)) throw Error(ErrorCategory::config, "kappa must be > 0");
  }
  // The absolute branch only rescales; fallback couplings are already in units of kappa.
  auto rate = [&](const std::string& key, std::optional<double> dflt) {
    if (merged.count(key)) return merged.at(key) / kappa;
    return lookup(key, dflt);
  };

  SystemParams p(rate("g_q", fq), rate("g_a", fa), rate("g_b", fb), 1.0);
  p = p.with_decay(rate("gamma_q", 0.0), rate("gamma_a", 0.0), rate("gamma_b", 0.0));
  p = p.with_detuning(rate("delta_q", 0.0), rate("delta_a", 0.0), rate("delta_b", 0.0));
  return p;
}

}  // namespace chiral::cli
