#include "cli/output.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <iostream>
#include <sstream>

#include <unistd.h>

namespace chiral::cli {

using nlohmann::ordered_json;

Format parse_format(const std::string& name) {
  if (name == "csv") return Format::csv;
  if (name == "json") return Format::json;
  throw Error(ErrorCategory::config, "unknown output format '" + name + "' (expected csv or json)");
}

std::string format_number(double value) {
  char buf[64];
  const auto [end, ec] = std::to_chars(buf, buf + sizeof buf, value, std::chars_format::general, 17);
  if (ec != std::errc()) throw Error(ErrorCategory::io, "number formatting failed");
  return std::string(buf, end);
}

void write_csv(const Table& table, std::ostream& out) {
  for (std::size_t c = 0; c < table.columns.size(); ++c) {
    out << (c ? "," : "") << table.columns[c];
  }
  out << '\n';
  for (const auto& row : table.rows) {
    for (std::size_t c = 0; c < row.size(); ++c) {
      out << (c ? "," : "") << format_number(row[c]);
    }
    out << '\n';
  }
}

namespace {

// JSON has no NaN; missing values become null.
ordered_json number(double v) { return std::isfinite(v) ? ordered_json(v) : ordered_json(nullptr); }

}  // namespace

ordered_json table_to_json(const Table& table) {
  ordered_json rows = ordered_json::array();
  for (const auto& row : table.rows) {
    ordered_json r = ordered_json::array();
    for (double v : row) r.push_back(number(v));
    rows.push_back(std::move(r));
  }
  return {{"schema_version", kSchemaVersion}, {"columns", table.columns}, {"rows", std::move(rows)}};
}

ordered_json to_json(const MeasurementRecord& r) {
  return {{"n_a", r.n_a}, {"n_b", r.n_b}, {"n_dark", r.n_dark}, {"n_runs", r.n_runs}, {"seed", r.seed}};
}

MeasurementRecord record_from_json(const nlohmann::json& j) {
  const nlohmann::json& rec = j.contains("record") ? j.at("record") : j;
  try {
    MeasurementRecord r = make_record(rec.at("n_a").get<std::uint64_t>(), rec.at("n_b").get<std::uint64_t>(),
                                      rec.value("n_dark", std::uint64_t{0}), rec.value("seed", std::uint64_t{0}));
    if (rec.contains("n_runs") && rec.at("n_runs").get<std::uint64_t>() != r.n_runs) {
      throw Error(ErrorCategory::config, "record n_runs does not equal n_a + n_b + n_dark");
    }
    return r;
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCategory::config, std::string("malformed measurement record: ") + e.what());
  }
}

ordered_json to_json(const ConcurrenceEstimate& e) {
  return {{"d_hat", number(e.d_hat)},
          {"sigma_d", number(e.sigma_d)},
          {"c_hat", number(e.c_hat)},
          {"c_interval", {number(e.c_low), number(e.c_high)}},
          {"n_emitting", e.n_emitting},
          {"diagnostics",
           {{"clipped_low", e.diagnostics.clipped_low},
            {"clipped_high", e.diagnostics.clipped_high},
            {"straddles_peak", e.diagnostics.straddles_peak}}}};
}

ordered_json to_json(const ScalingResult& s) {
  ordered_json points = ordered_json::array();
  for (const auto& p : s.points) {
    ordered_json jp = {{"n_runs", p.n_runs},
                       {"sigma_c", number(p.sigma_c)},
                       {"mean_c", number(p.mean_c)},
                       {"successes", p.successes},
                       {"failures", p.failures}};
    if (!p.last_failure.empty()) jp["last_failure"] = p.last_failure;
    points.push_back(std::move(jp));
  }
  return {{"schema_version", kSchemaVersion},
          {"exponent", number(s.exponent)},
          {"coefficient", number(s.coefficient)},
          {"residual", number(s.residual)},
          {"points", std::move(points)}};
}

void ensure_writable(const std::string& path) {
  if (path.empty() || path == "-") return;
  const std::filesystem::path p(path);
  std::filesystem::path dir = p.parent_path();
  if (dir.empty()) dir = ".";
  std::error_code ec;
  if (!std::filesystem::is_directory(dir, ec)) {
    throw Error(ErrorCategory::io, "output directory does not exist: " + dir.string());
  }
  if (::access(dir.c_str(), W_OK) != 0) {
    throw Error(ErrorCategory::io, "output directory is not writable: " + dir.string());
  }
}

void write_text(const std::string& path, const std::string& content) {
  if (path.empty() || path == "-") {
    std::cout << content;
    std::cout.flush();
    return;
  }
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCategory::io, "cannot open " + path + " for writing");
  out << content;
  out.close();
  if (!out) throw Error(ErrorCategory::io, "failed writing " + path);
}

std::string render(const Table& table, Format format) {
  if (format == Format::json) return table_to_json(table).dump(2) + "\n";
  std::ostringstream out;
  write_csv(table, out);
  return out.str();
}

}  // namespace chiral::cli
