#include "eprenorm/output.hpp"

#include <chrono>
#include <cmath>
#include <ctime>
#include <fstream>
#include <iostream>
#include <sstream>

#include <fmt/format.h>

#include "eprenorm/config.hpp"
#include "eprenorm/units.hpp"

#ifndef EPRENORM_VERSION
#define EPRENORM_VERSION "0.0.0"
#endif

namespace eprenorm::cli {

namespace {

std::filesystem::path with_suffix(const std::filesystem::path& p, const std::string& suffix) {
  return std::filesystem::path(p.string() + suffix);
}

void write_file(const std::filesystem::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError("cannot write '" + path.string() + "'");
  out << content;
  if (!out) throw ConfigError("write failed for '" + path.string() + "'");
}

nlohmann::ordered_json cell_json(const Cell& c) {
  if (const auto* d = std::get_if<double>(&c)) {
    if (!std::isfinite(*d)) return nullptr;
    return *d;
  }
  if (const auto* i = std::get_if<std::int64_t>(&c)) return *i;
  return std::get<std::string>(c);
}

std::string cell_text(const Cell& c) {
  if (const auto* d = std::get_if<double>(&c)) return format_number(*d);
  if (const auto* i = std::get_if<std::int64_t>(&c)) return std::to_string(*i);
  return std::get<std::string>(c);
}

std::string render_csv(const Table& table, const RunManifest& manifest) {
  std::string s;
  for (const auto& line : manifest.comment_lines()) s += "# " + line + "\n";
  for (const auto& line : table.summary) s += "# " + line + "\n";
  for (std::size_t i = 0; i < table.columns.size(); ++i) s += (i ? "," : "") + table.columns[i];
  s += "\n";
  for (const auto& row : table.rows) {
    for (std::size_t i = 0; i < row.size(); ++i) s += (i ? "," : "") + cell_text(row[i]);
    s += "\n";
  }
  return s;
}

std::string render_json(const Table& table, const RunManifest& manifest) {
  nlohmann::ordered_json doc;
  doc["manifest"] = manifest.to_json(false);
  doc["summary"] = table.summary_json;
  doc["columns"] = table.columns;
  auto rows = nlohmann::ordered_json::array();
  for (const auto& row : table.rows) {
    auto r = nlohmann::ordered_json::array();
    for (const auto& c : row) r.push_back(cell_json(c));
    rows.push_back(std::move(r));
  }
  doc["rows"] = std::move(rows);
  return doc.dump(2) + "\n";
}

void write_sidecar(RunManifest manifest, const std::filesystem::path& out) {
  manifest.timestamp = utc_timestamp();
  write_file(with_suffix(out, ".manifest.json"), manifest.to_json(true).dump(2) + "\n");
}

}  // namespace

std::string tool_version() { return EPRENORM_VERSION; }

std::string utc_timestamp() {
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

std::string format_number(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  if (v == 0.0) return "0";
  return fmt::format("{:.12g}", v);
}

nlohmann::ordered_json RunManifest::to_json(bool with_timestamp) const {
  nlohmann::ordered_json j;
  j["tool"] = "eprenorm";
  j["version"] = tool_version();
  j["subcommand"] = subcommand;
  j["config"] = config_source;
  j["parameters_hz"] = {{"omega_m", units::angular_to_hz(params.omega_m())},
                        {"kappa", units::angular_to_hz(params.kappa())},
                        {"gamma", units::angular_to_hz(params.gamma())},
                        {"omega_c", units::angular_to_hz(params.omega_c())},
                        {"g_c", units::angular_to_hz(params.g_c())}};
  if (drive) {
    j["drive_hz"] = {{"detuning", units::angular_to_hz(drive->delta())}, {"coupling", units::angular_to_hz(drive->g())}};
  }
  auto s = nlohmann::ordered_json::object();
  for (const auto& [k, v] : settings) s[k] = v;
  j["settings"] = s;
  auto g = nlohmann::ordered_json::array();
  for (const auto& grid : grids) {
    g.push_back({{"name", grid.name}, {"min_khz", grid.min_khz}, {"max_khz", grid.max_khz}, {"points", grid.points}});
  }
  j["grids"] = g;
  j["outputs"] = outputs;
  if (with_timestamp) j["timestamp"] = timestamp;
  return j;
}

std::vector<std::string> RunManifest::comment_lines() const {
  std::vector<std::string> lines;
  lines.push_back("eprenorm " + tool_version() + " " + subcommand);
  lines.push_back("config: " + config_source);
  lines.push_back("omega_m_hz=" + format_number(units::angular_to_hz(params.omega_m())) +
                  " kappa_hz=" + format_number(units::angular_to_hz(params.kappa())) +
                  " gamma_hz=" + format_number(units::angular_to_hz(params.gamma())) +
                  " omega_c_hz=" + format_number(units::angular_to_hz(params.omega_c())) +
                  " g_c_hz=" + format_number(units::angular_to_hz(params.g_c())));
  if (drive) {
    lines.push_back("drive: detuning_hz=" + format_number(units::angular_to_hz(drive->delta())) +
                    " coupling_hz=" + format_number(units::angular_to_hz(drive->g())));
  }
  for (const auto& [k, v] : settings) lines.push_back(k + ": " + v);
  for (const auto& grid : grids) {
    lines.push_back("grid " + grid.name + ": " + format_number(grid.min_khz) + " .. " + format_number(grid.max_khz) +
                    " kHz, " + std::to_string(grid.points) + " points");
  }
  for (const auto& o : outputs) lines.push_back("output: " + o);
  return lines;
}

void emit_table(const Table& table, RunManifest manifest, const OutputOptions& options) {
  if (!options.out) {
    std::cout << (options.json ? render_json(table, manifest) : render_csv(table, manifest));
    return;
  }
  const std::filesystem::path csv = *options.out;
  manifest.outputs = {csv.filename().string()};
  if (options.json) manifest.outputs.push_back(with_suffix(csv, ".json").filename().string());
  manifest.outputs.push_back(with_suffix(csv, ".manifest.json").filename().string());
  write_file(csv, render_csv(table, manifest));
  if (options.json) write_file(with_suffix(csv, ".json"), render_json(table, manifest));
  write_sidecar(manifest, csv);
}

void emit_report(const std::string& text, const nlohmann::ordered_json& doc, RunManifest manifest,
                 const OutputOptions& options) {
  nlohmann::ordered_json full;
  if (options.out) {
    manifest.outputs = {options.out->filename().string(), with_suffix(*options.out, ".manifest.json").filename().string()};
  }
  full["manifest"] = manifest.to_json(false);
  for (const auto& [k, v] : doc.items()) full[k] = v;
  std::string body;
  if (options.json) {
    body = full.dump(2) + "\n";
  } else {
    for (const auto& line : manifest.comment_lines()) body += "# " + line + "\n";
    body += text;
  }
  if (!options.out) {
    std::cout << body;
    return;
  }
  write_file(*options.out, body);
  write_sidecar(manifest, *options.out);
}

}  // namespace eprenorm::cli
