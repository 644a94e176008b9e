#pragma once

#include <complex>
#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "talbot/materials.hpp"

namespace talbot {

enum class ScatteringRegime { rayleigh, mie, automatic };

ScatteringRegime parse_regime(const std::string& text);
std::string to_string(ScatteringRegime regime);

/// Size parameter kR at or below which `automatic` means Rayleigh.
inline constexpr double rayleigh_size_limit = 0.1;

struct SphereOptics {
  double radius = 0.0;
  std::shared_ptr<const OpticalTable> table;
  ScatteringRegime regime = ScatteringRegime::automatic;

  std::complex<double> permittivity(double omega) const;
  /// Resolves `automatic` for wavenumber k.
  ScatteringRegime regime_at(double k) const;
};

/// A homogeneous sphere of a given material and mass.
struct Particle {
  Material material;
  double mass = 0.0;  // kg
  ScatteringRegime regime = ScatteringRegime::automatic;

  double radius() const { return radius_from_mass(mass, material.density); }
  double heat_capacity() const noexcept { return mass * material.specific_heat; }
  SphereOptics optics() const { return {radius(), material.optical_table, regime}; }
  void validate() const;
};

/// (ε - 1)/(ε + 2)
std::complex<double> clausius_mossotti(std::complex<double> eps);

/// α = 4π ε0 R³ (ε - 1)/(ε + 2), in C m²/V.
std::complex<double> rayleigh_polarizability(double radius, std::complex<double> eps);

/// Lorenz-Mie coefficients a_n, b_n (n = 1..N) of a homogeneous sphere with
/// relative refractive index m and size parameter x = kR. N follows the
/// usual ⌈x + 4x^{1/3} + 2⌉ rule plus `extra_orders`.
class MieSolution {
 public:
  MieSolution(std::complex<double> relative_index, double size_parameter, int extra_orders = 0);

  int orders() const noexcept { return static_cast<int>(a_.size()); }
  double size_parameter() const noexcept { return x_; }
  /// a(n), b(n) for n >= 1; zero beyond the computed orders.
  std::complex<double> a(int n) const noexcept;
  std::complex<double> b(int n) const noexcept;

  double q_scattering() const noexcept { return q_sca_; }
  double q_extinction() const noexcept { return q_ext_; }
  double q_absorption() const noexcept { return q_ext_ - q_sca_; }

  /// Amplitude functions S1(μ), S2(μ) with μ = cos θ.
  std::pair<std::complex<double>, std::complex<double>> amplitudes(double mu) const;

 private:
  double x_;
  std::vector<std::complex<double>> a_;
  std::vector<std::complex<double>> b_;
  double q_sca_ = 0.0;
  double q_ext_ = 0.0;
};

int mie_order_count(double size_parameter);

struct CrossSections {
  double scattering = 0.0;  // m^2
  double absorption = 0.0;  // m^2
  double extinction = 0.0;  // m^2
};

/// Scattering of a plane wave of wavenumber k, prepared once and queried at
/// many directions. Angular quantities are averaged over the two incident
/// linear polarizations and the scattering azimuth, so they depend on n_z only.
class AngularScattering {
 public:
  AngularScattering(const SphereOptics& optics, double k, int extra_mie_orders = 0);

  ScatteringRegime regime() const noexcept { return regime_; }
  double k() const noexcept { return k_; }
  std::complex<double> permittivity() const noexcept { return eps_; }
  const MieSolution* mie() const noexcept { return mie_ ? &*mie_ : nullptr; }

  CrossSections cross_sections() const noexcept { return sections_; }
  /// σ_ext from the forward amplitude (optical theorem).
  double forward_extinction() const;

  std::complex<double> amplitude(double nz) const;
  double amplitude_squared(double nz) const;
  /// Azimuth-averaged f*(k, k n) f(-k, k n).
  std::complex<double> backward_product(double nz) const;

  /// Longitudinal force in a standing wave of peak intensity `intensity_norm`
  /// with an antinode at z = 0.
  double standing_wave_force(double z, double intensity_norm) const;

 private:
  ScatteringRegime regime_;
  double k_;
  double radius_;
  std::complex<double> eps_;
  std::complex<double> alpha_hat_;
  std::optional<MieSolution> mie_;
  CrossSections sections_;
};

CrossSections cross_sections(const SphereOptics& optics, double omega);
std::complex<double> scattering_amplitude(const SphereOptics& optics, double k, double nz);
double standing_wave_force(const SphereOptics& optics, double k, double z, double intensity_norm);

}  // namespace talbot
