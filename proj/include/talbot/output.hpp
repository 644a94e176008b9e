#pragma once

#include <filesystem>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "talbot/analysis.hpp"
#include "talbot/environment.hpp"
#include "talbot/pattern.hpp"

namespace talbot {

struct RunManifest {
  std::string digest;
  std::string tool_version;
  std::string timestamp;  // UTC, ISO 8601; JSON only, so CSV bytes stay reproducible
  std::vector<std::string> warnings;
};

RunManifest make_manifest(const std::string& digest, std::vector<std::string> warnings = {});

std::string sha256_hex(const std::string& data);

/// Shortest decimal text that reads back to the same double.
std::string format_number(double value);

void write_pattern_csv(std::ostream& out, const RunManifest& manifest, const PatternResult& quantum,
                       const PatternResult& classical, const PatternResult* csl);
void write_grid_csv(std::ostream& out, const RunManifest& manifest, const ExclusionGrid& grid);
void write_boundary_csv(std::ostream& out, const RunManifest& manifest, const ExclusionGrid& grid);
void write_temperature_csv(std::ostream& out, const RunManifest& manifest, const InternalTempTrajectory& traj);

/// Writes `content` to `path`, creating parent directories.
void write_file(const std::filesystem::path& path, const std::string& content);

}  // namespace talbot
