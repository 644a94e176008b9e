#include "talbot/materials.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include "talbot/constants.hpp"
#include "talbot/errors.hpp"

namespace talbot {

namespace {

std::string trim(const std::string& s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\n");
  return s.substr(first, last - first + 1);
}

double parse_number(const std::string& field, const std::string& source, int line) {
  const std::string t = trim(field);
  std::size_t used = 0;
  double value = 0.0;
  try {
    value = std::stod(t, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (t.empty() || used != t.size() || !std::isfinite(value)) {
    throw ConfigError(source + ":" + std::to_string(line) + ": cannot parse number '" + t + "'");
  }
  return value;
}

void check_rows(const std::vector<OpticalRow>& rows, const std::string& source) {
  if (rows.size() < 2) throw ConfigError(source + ": optical table needs at least 2 rows");
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (!(rows[i].wavelength > 0.0)) {
      throw ConfigError(source + ": row " + std::to_string(i + 1) + ": wavelength must be positive");
    }
    if (rows[i].n_imag < 0.0) {
      throw ConfigError(source + ": row " + std::to_string(i + 1) +
                        ": negative n_imag, gain medium unsupported");
    }
    if (i > 0 && !(rows[i].wavelength > rows[i - 1].wavelength)) {
      throw ConfigError(source + ": row " + std::to_string(i + 1) + ": non-monotone wavelengths");
    }
  }
}

}  // namespace

OpticalTable::OpticalTable(std::vector<OpticalRow> rows, std::string source)
    : rows_(std::move(rows)), source_(std::move(source)) {
  check_rows(rows_, source_.empty() ? "<table>" : source_);
}

double OpticalTable::min_omega() const noexcept {
  return 2.0 * constants::pi * constants::c / max_wavelength();
}

double OpticalTable::max_omega() const noexcept {
  return 2.0 * constants::pi * constants::c / min_wavelength();
}

bool OpticalTable::covers_wavelength(double wavelength) const noexcept {
  return wavelength >= min_wavelength() && wavelength <= max_wavelength();
}

std::complex<double> OpticalTable::refractive_index(double wavelength) const {
  if (!covers_wavelength(wavelength)) {
    std::ostringstream msg;
    msg << "wavelength " << wavelength << " m outside optical table range [" << min_wavelength()
        << ", " << max_wavelength() << "] m";
    if (!source_.empty()) msg << " (" << source_ << ")";
    throw RangeError(msg.str());
  }
  auto upper = std::lower_bound(rows_.begin(), rows_.end(), wavelength,
                                [](const OpticalRow& r, double w) { return r.wavelength < w; });
  if (upper == rows_.begin()) return {upper->n_real, upper->n_imag};
  const auto lower = upper - 1;
  const double t = (wavelength - lower->wavelength) / (upper->wavelength - lower->wavelength);
  return {lower->n_real + t * (upper->n_real - lower->n_real),
          lower->n_imag + t * (upper->n_imag - lower->n_imag)};
}

OpticalTable parse_optical_table(const std::string& text, const std::string& source) {
  std::istringstream in(text);
  std::string line;
  int line_no = 0;
  bool header_seen = false;
  std::vector<OpticalRow> rows;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string t = trim(line);
    if (t.empty() || t[0] == '#') continue;
    if (!header_seen) {
      std::string compact;
      for (char ch : t) {
        if (ch != ' ' && ch != '\t') compact.push_back(ch);
      }
      if (compact != "wavelength_m,n_real,n_imag") {
        throw ConfigError(source + ":" + std::to_string(line_no) +
                          ": expected header 'wavelength_m,n_real,n_imag'");
      }
      header_seen = true;
      continue;
    }
    std::vector<std::string> fields;
    std::stringstream ss(t);
    std::string field;
    while (std::getline(ss, field, ',')) fields.push_back(field);
    if (fields.size() != 3) {
      throw ConfigError(source + ":" + std::to_string(line_no) + ": expected 3 columns");
    }
    OpticalRow row{parse_number(fields[0], source, line_no), parse_number(fields[1], source, line_no),
                   parse_number(fields[2], source, line_no)};
    if (row.n_imag < 0.0) {
      throw ConfigError(source + ":" + std::to_string(line_no) +
                        ": negative n_imag, gain medium unsupported");
    }
    if (!rows.empty() && !(row.wavelength > rows.back().wavelength)) {
      throw ConfigError(source + ":" + std::to_string(line_no) + ": non-monotone wavelengths");
    }
    rows.push_back(row);
  }
  if (!header_seen) throw ConfigError(source + ": missing header line");
  return OpticalTable(std::move(rows), source);
}

OpticalTable load_optical_table(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open optical table " + path.string());
  std::stringstream buffer;
  buffer << in.rdbuf();
  return parse_optical_table(buffer.str(), path.string());
}

std::complex<double> permittivity(const OpticalTable& table, double omega) {
  if (!(omega > 0.0)) throw RangeError("permittivity needs omega > 0");
  const std::complex<double> n = table.refractive_index(2.0 * constants::pi * constants::c / omega);
  return n * n;
}

void Material::validate() const {
  if (!(density > 0.0)) throw ConfigError("material " + name + ": density must be positive");
  if (!(specific_heat > 0.0)) throw ConfigError("material " + name + ": specific heat must be positive");
  if (!(ionization_energy > 0.0)) {
    throw ConfigError("material " + name + ": ionization energy must be positive");
  }
  if (!optical_table) throw ConfigError("material " + name + ": missing optical table");
}

void GasSpecies::validate() const {
  if (!(polarizability_volume > 0.0) || !(ionization_energy > 0.0) || !(mass > 0.0)) {
    throw ConfigError("gas species parameters must be positive");
  }
}

GasSpecies nitrogen() { return {1.74e-30, 15.6e-19, 28.0 * constants::amu}; }

std::filesystem::path default_data_directory() {
  if (const char* env = std::getenv("TALBOT_DATA_DIR"); env && *env) return env;
  return TALBOT_DATA_DIR;
}

namespace {

std::shared_ptr<const OpticalTable> shipped_table(const char* file) {
  return std::make_shared<const OpticalTable>(load_optical_table(default_data_directory() / "optics" / file));
}

}  // namespace

Material silicon(std::shared_ptr<const OpticalTable> table) {
  if (!table) table = shipped_table("si.csv");
  return {"Si", 2329.0, 700.0, 5e-19, std::move(table)};
}

Material silica(std::shared_ptr<const OpticalTable> table) {
  if (!table) table = shipped_table("sio2.csv");
  return {"SiO2", 1850.0, 700.0, 5e-19, std::move(table)};
}

Material material_by_name(const std::string& name, std::shared_ptr<const OpticalTable> table) {
  std::string lower = name;
  std::transform(lower.begin(), lower.end(), lower.begin(), [](unsigned char ch) { return std::tolower(ch); });
  if (lower == "si" || lower == "silicon") return silicon(std::move(table));
  if (lower == "sio2" || lower == "silica") return silica(std::move(table));
  throw ConfigError("unknown material '" + name + "' (expected Si or SiO2)");
}

double radius_from_mass(double mass, double density) {
  if (!(mass > 0.0) || !(density > 0.0)) throw ConfigError("radius_from_mass needs positive mass and density");
  return std::cbrt(3.0 * mass / (4.0 * constants::pi * density));
}

}  // namespace talbot
