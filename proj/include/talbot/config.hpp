#pragma once

#include <filesystem>
#include <string>

#include "talbot/pattern.hpp"

namespace talbot {

/// Reads a TOML experiment description (SI units throughout). Missing keys take
/// the documented defaults; unknown keys and invalid values raise ConfigError
/// naming the key path. A relative `particle.optical_table` is resolved against
/// the config file's directory.
ExperimentConfig parse_config(const std::filesystem::path& path);
ExperimentConfig parse_config_text(const std::string& text, const std::filesystem::path& base_dir = {});

/// Canonical TOML form: every field explicit, fixed key order, shortest
/// round-trip numbers. parse_config_text(serialize_config(c)) reproduces c.
std::string serialize_config(const ExperimentConfig& config);

/// SHA-256 (hex) of the canonical form.
std::string config_digest(const ExperimentConfig& config);

}  // namespace talbot
