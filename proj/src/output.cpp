#include "talbot/output.hpp"

#include <openssl/evp.h>

#include <charconv>
#include <chrono>
#include <cmath>
#include <ctime>
#include <fstream>
#include <iomanip>
#include <sstream>

#include "talbot/errors.hpp"
#include "talbot/version.hpp"

namespace talbot {

std::string sha256_hex(const std::string& data) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int length = 0;
  if (EVP_Digest(data.data(), data.size(), digest, &length, EVP_sha256(), nullptr) != 1) {
    throw Error("SHA-256 computation failed");
  }
  std::ostringstream out;
  for (unsigned int i = 0; i < length; ++i) out << std::hex << std::setw(2) << std::setfill('0') << int(digest[i]);
  return out.str();
}

std::string format_number(double value) {
  if (std::isnan(value)) return "nan";
  char buffer[64];
  const auto [end, ec] = std::to_chars(buffer, buffer + sizeof buffer, value);
  if (ec != std::errc()) throw Error("number formatting failed");
  return std::string(buffer, end);
}

RunManifest make_manifest(const std::string& digest, std::vector<std::string> warnings) {
  RunManifest m;
  m.digest = digest;
  m.tool_version = version;
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm utc{};
  gmtime_r(&now, &utc);
  std::ostringstream ts;
  ts << std::put_time(&utc, "%Y-%m-%dT%H:%M:%SZ");
  m.timestamp = ts.str();
  m.warnings = std::move(warnings);
  return m;
}

namespace {

void header(std::ostream& out, const RunManifest& m) {
  out << "# talbot " << m.tool_version << "\n";
  out << "# config_sha256 " << m.digest << "\n";
  for (const auto& w : m.warnings) out << "# warning: " << w << "\n";
}

}  // namespace

void write_pattern_csv(std::ostream& out, const RunManifest& manifest, const PatternResult& quantum,
                       const PatternResult& classical, const PatternResult* csl) {
  if (quantum.x.size() != classical.x.size() || (csl && csl->x.size() != quantum.x.size())) {
    throw ConfigError("patterns to write are sampled on different grids");
  }
  header(out, manifest);
  out << "x_m,P_quantum,P_classical" << (csl ? ",P_csl" : "") << "\n";
  for (Eigen::Index i = 0; i < quantum.x.size(); ++i) {
    out << format_number(quantum.x(i)) << ',' << format_number(quantum.P(i)) << ',' << format_number(classical.P(i));
    if (csl) out << ',' << format_number(csl->P(i));
    out << "\n";
  }
}

void write_grid_csv(std::ostream& out, const RunManifest& manifest, const ExclusionGrid& grid) {
  header(out, manifest);
  out << "r_c_m,lambda_per_s,aleph\n";
  for (Eigen::Index i = 0; i < grid.r_c.size(); ++i) {
    for (Eigen::Index j = 0; j < grid.lambda.size(); ++j) {
      out << format_number(grid.r_c(i)) << ',' << format_number(grid.lambda(j)) << ','
          << format_number(grid.aleph(i, j)) << "\n";
    }
  }
}

void write_boundary_csv(std::ostream& out, const RunManifest& manifest, const ExclusionGrid& grid) {
  header(out, manifest);
  out << "r_c_m,lambda_per_s\n";
  for (const auto& [rc, lambda] : grid.boundary) out << format_number(rc) << ',' << format_number(lambda) << "\n";
}

void write_temperature_csv(std::ostream& out, const RunManifest& manifest, const InternalTempTrajectory& traj) {
  header(out, manifest);
  out << "t_s,T_int_K\n";
  for (std::size_t i = 0; i < traj.time.size(); ++i) {
    out << format_number(traj.time[i]) << ',' << format_number(traj.temperature[i]) << "\n";
  }
}

void write_file(const std::filesystem::path& path, const std::string& content) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError("cannot write " + path.string());
  out << content;
  if (!out) throw ConfigError("failed writing " + path.string());
}

}  // namespace talbot
