#pragma once

#include <complex>
#include <filesystem>
#include <memory>
#include <string>
#include <vector>

namespace talbot {

struct OpticalRow {
  double wavelength;  // m
  double n_real;
  double n_imag;
};

/// Complex refractive index tabulated against vacuum wavelength.
///
/// Rows are strictly increasing in wavelength and describe a passive medium
/// (n_imag >= 0). Lookups interpolate Re n and Im n linearly in wavelength and
/// never extrapolate.
class OpticalTable {
 public:
  explicit OpticalTable(std::vector<OpticalRow> rows, std::string source = {});

  const std::vector<OpticalRow>& rows() const noexcept { return rows_; }
  const std::string& source() const noexcept { return source_; }

  double min_wavelength() const noexcept { return rows_.front().wavelength; }
  double max_wavelength() const noexcept { return rows_.back().wavelength; }
  double min_omega() const noexcept;
  double max_omega() const noexcept;

  bool covers_wavelength(double wavelength) const noexcept;

  /// Throws RangeError outside [min_wavelength, max_wavelength].
  std::complex<double> refractive_index(double wavelength) const;

 private:
  std::vector<OpticalRow> rows_;
  std::string source_;
};

/// Reads the `wavelength_m,n_real,n_imag` CSV format. Lines starting with '#'
/// are comments. Errors carry the offending line number.
OpticalTable load_optical_table(const std::filesystem::path& path);
OpticalTable parse_optical_table(const std::string& text, const std::string& source = "<memory>");

/// ε(ω) = n(λ)² with λ = 2πc/ω.
std::complex<double> permittivity(const OpticalTable& table, double omega);

struct Material {
  std::string name;
  double density;            // kg/m^3
  double specific_heat;      // J/(kg K)
  double ionization_energy;  // J
  std::shared_ptr<const OpticalTable> optical_table;

  void validate() const;
};

struct GasSpecies {
  double polarizability_volume;  // α_g/(4π ε0), m^3
  double ionization_energy;      // J
  double mass;                   // kg

  void validate() const;
};

/// Residual nitrogen as used for ultra-high-vacuum chambers.
GasSpecies nitrogen();

/// Directory holding the shipped optical tables.
std::filesystem::path default_data_directory();

/// Built-in material records. The optical table is loaded from
/// `default_data_directory()/optics/<file>` unless `table` is given.
Material silicon(std::shared_ptr<const OpticalTable> table = nullptr);
Material silica(std::shared_ptr<const OpticalTable> table = nullptr);
Material material_by_name(const std::string& name, std::shared_ptr<const OpticalTable> table = nullptr);

/// Radius of a homogeneous sphere, (3m/(4πρ))^{1/3}.
double radius_from_mass(double mass, double density);

}  // namespace talbot
