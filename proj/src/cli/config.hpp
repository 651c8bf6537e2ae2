#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>

#include "chiral/model.hpp"

namespace chiral::cli {

/// Values collected from one source (a config file, or the command line).
struct ParamSource {
  std::map<std::string, double> values;
  std::optional<std::string> units;
};

/// Keys accepted in config files: the ten rates plus `units`.
bool is_known_key(std::string_view key);

/// Parses `key = value` lines. Blank lines and lines starting with '#' are
/// skipped. Malformed lines and unknown keys raise ErrorCategory::config with
/// the line number.
ParamSource parse_config_text(std::string_view text, std::string_view source_name = "<config>");

ParamSource read_config_file(const std::filesystem::path& path);

/// Merges file and flag values (flags win) into parameters in units of kappa.
///
/// units = "kappa" (default): every rate is already in units of kappa, and an
/// explicit kappa other than 1 is a conflict. units = "absolute": rates share
/// an arbitrary unit and are divided by the given kappa. A file and a flag
/// naming different units is an error.
///
/// Missing couplings come from `fallback` when given, otherwise they are an
/// error. Missing decay rates and detunings default to 0.
SystemParams resolve_params(const ParamSource& file, const ParamSource& flags,
                            const std::optional<SystemParams>& fallback = std::nullopt);

}  // namespace chiral::cli
