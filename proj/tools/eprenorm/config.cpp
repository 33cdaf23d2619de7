#include "eprenorm/config.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>

#include <yaml-cpp/yaml.h>

#include "eprenorm/units.hpp"

namespace eprenorm::cli {

namespace {

std::string where(const std::string& source, const YAML::Mark& mark) {
  if (mark.line < 0) return source;
  return source + ":" + std::to_string(mark.line + 1) + ":" + std::to_string(mark.column + 1);
}

struct Value {
  double number;
  YAML::Mark mark;
};

bool looks_like_gc(const std::string& key) {
  return key == "g_c" || key == "gc" || key == "g_c_hz" || key == "gc_hz" || key == "coupling_hz";
}

}  // namespace

Config default_config() { return {representative_params(), std::nullopt, "builtin"}; }

Config parse_config(const std::string& yaml_text, const std::string& source) {
  YAML::Node root;
  try {
    root = YAML::Load(yaml_text);
  } catch (const YAML::Exception& e) {
    throw ConfigError(where(source, e.mark) + ": " + e.msg);
  }
  if (!root.IsMap()) throw ConfigError(source + ": top level must be a mapping");

  static const std::map<std::string, std::vector<std::string>> schema{
      {"mechanics", {"freq_hz", "gamma_hz"}},
      {"cavity", {"kappa_hz"}},
      {"bath", {"cutoff_hz"}},
      {"drive", {"detuning_hz", "coupling_hz"}},
  };

  std::map<std::string, Value> values;
  for (const auto& section : root) {
    const std::string name = section.first.as<std::string>();
    const auto it = schema.find(name);
    if (it == schema.end()) throw ConfigError(where(source, section.first.Mark()) + ": unknown section '" + name + "'");
    if (!section.second.IsMap()) {
      throw ConfigError(where(source, section.second.Mark()) + ": section '" + name + "' must be a mapping");
    }
    for (const auto& entry : section.second) {
      const std::string key = entry.first.as<std::string>();
      const std::string full = name + "." + key;
      if (name != "drive" && looks_like_gc(key)) {
        throw ConfigError(where(source, entry.first.Mark()) + ": '" + full +
                          "' cannot be set; the pseudomode coupling is fixed by gamma_hz and cutoff_hz");
      }
      if (std::find(it->second.begin(), it->second.end(), key) == it->second.end()) {
        throw ConfigError(where(source, entry.first.Mark()) + ": unknown key '" + full + "'");
      }
      double v = 0.0;
      try {
        v = entry.second.as<double>();
      } catch (const YAML::Exception&) {
        throw ConfigError(where(source, entry.second.Mark()) + ": '" + full + "' must be a number");
      }
      if (!std::isfinite(v)) throw ConfigError(where(source, entry.second.Mark()) + ": '" + full + "' must be finite");
      values[full] = {v, entry.second.Mark()};
    }
  }

  const auto require = [&](const std::string& key, bool strictly_positive) {
    const auto it = values.find(key);
    if (it == values.end()) throw ConfigError(source + ": missing required key '" + key + "'");
    const double v = it->second.number;
    if (strictly_positive ? !(v > 0.0) : !(v >= 0.0)) {
      throw ConfigError(where(source, it->second.mark) + ": '" + key + "' must be " +
                        (strictly_positive ? "> 0" : ">= 0"));
    }
    return v;
  };

  Config cfg{SystemParams::from_hz(require("mechanics.freq_hz", true), require("cavity.kappa_hz", true),
                                   require("mechanics.gamma_hz", false), require("bath.cutoff_hz", false)),
             std::nullopt, source};

  const bool has_delta = values.count("drive.detuning_hz") != 0;
  const bool has_g = values.count("drive.coupling_hz") != 0;
  if (has_delta != has_g) throw ConfigError(source + ": 'drive' needs both detuning_hz and coupling_hz");
  if (has_delta) {
    cfg.drive = DriveParams::from_hz(values["drive.detuning_hz"].number, require("drive.coupling_hz", false));
  }
  return cfg;
}

Config load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config '" + path.string() + "'");
  std::ostringstream text;
  text << in.rdbuf();
  return parse_config(text.str(), path.string());
}

}  // namespace eprenorm::cli
