#pragma once

#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>

#include "eprenorm/model.hpp"

namespace eprenorm::cli {

/// Bad config file or flag value; maps to exit status 1.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct Config {
  SystemParams system;
  std::optional<DriveParams> drive;
  std::string source;  // file path, or "builtin"
};

/// The representative parameters, identical to configs/default.yaml.
Config default_config();

Config parse_config(const std::string& yaml_text, const std::string& source);
Config load_config(const std::filesystem::path& path);

}  // namespace eprenorm::cli
