#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include <nlohmann/json.hpp>

#include "eprenorm/model.hpp"

namespace eprenorm::cli {

struct GridSpec {
  std::string name;
  double min_khz;
  double max_khz;
  std::size_t points;
};

/// Everything needed to reproduce a data file. The timestamp is kept out of
/// the data files themselves so that reruns stay byte-identical.
struct RunManifest {
  std::string subcommand;
  std::string config_source;
  SystemParams params;
  std::optional<DriveParams> drive;
  std::vector<std::pair<std::string, std::string>> settings;
  std::vector<GridSpec> grids;
  std::vector<std::string> outputs;
  std::string timestamp;

  nlohmann::ordered_json to_json(bool with_timestamp) const;
  std::vector<std::string> comment_lines() const;
};

std::string tool_version();
std::string utc_timestamp();

/// Fixed formatting: 12 significant digits, "nan"/"inf" spelled out.
std::string format_number(double v);

using Cell = std::variant<double, std::int64_t, std::string>;

struct Table {
  std::vector<std::string> columns;
  std::vector<std::vector<Cell>> rows;
  std::vector<std::string> summary;        // extra comment lines after the manifest
  nlohmann::ordered_json summary_json = nlohmann::ordered_json::object();
};

struct OutputOptions {
  std::optional<std::filesystem::path> out;
  bool json = false;
};

/// Writes CSV (and the JSON twin when requested) to --out or stdout, plus the
/// timestamped manifest sidecar next to file outputs.
void emit_table(const Table& table, RunManifest manifest, const OutputOptions& options);

/// Reports are small key/value documents (ep, embedcheck).
void emit_report(const std::string& text, const nlohmann::ordered_json& doc, RunManifest manifest,
                 const OutputOptions& options);

}  // namespace eprenorm::cli
