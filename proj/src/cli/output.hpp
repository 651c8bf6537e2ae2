#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include <json.hpp>

#include "chiral/inference.hpp"

namespace chiral::cli {

inline constexpr int kSchemaVersion = 1;

enum class Format { csv, json };

Format parse_format(const std::string& name);

/// Column-major numeric results destined for CSV or JSON.
struct Table {
  std::vector<std::string> columns;
  std::vector<std::vector<double>> rows;
};

/// Shortest-safe formatting: 17 significant digits, '.' separator,
/// independent of the global locale.
std::string format_number(double value);

void write_csv(const Table& table, std::ostream& out);
nlohmann::ordered_json table_to_json(const Table& table);

nlohmann::ordered_json to_json(const MeasurementRecord& record);
MeasurementRecord record_from_json(const nlohmann::json& j);
nlohmann::ordered_json to_json(const ConcurrenceEstimate& est);
nlohmann::ordered_json to_json(const ScalingResult& result);

/// Fails with ErrorCategory::io unless the file can be created: the parent
/// directory must exist and be writable. "-" means stdout and always passes.
void ensure_writable(const std::string& path);

/// Writes `content` to `path` ("-" or empty: stdout).
void write_text(const std::string& path, const std::string& content);

std::string render(const Table& table, Format format);

}  // namespace chiral::cli
