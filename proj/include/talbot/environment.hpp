#pragma once

#include <string>
#include <vector>

#include "talbot/materials.hpp"
#include "talbot/optics.hpp"

namespace talbot {

struct EnvironmentParams {
  double temperature = 4.0;  // K
  GasSpecies gas = nitrogen();
  double pressure = 1e-8;      // Pa
  double gas_velocity = 0.0;   // m/s; 0 selects sqrt(2 k_B T / m_g)

  double mean_velocity() const;
  void validate() const;
};

struct TrapParams {
  double wavelength = 1550e-9;   // m
  double cooling_time = 1.0;     // s
  double intensity = 90e9;       // W/m^2
  double mech_frequency = 200.0; // Hz
  double com_temperature = 20e-3;  // K

  void validate() const;
};

enum class ScatteringTimeConvention { as_printed, symmetric };

ScatteringTimeConvention parse_scattering_convention(const std::string& text);
std::string to_string(ScatteringTimeConvention convention);

struct DecoherenceChannels {
  bool collisions = true;
  bool absorption = true;
  bool scattering = true;
  bool emission = true;
};

/// Static volume polarizability R³ Re[(ε-1)/(ε+2)] taken at the longest
/// tabulated wavelength.
double static_polarizability_volume(const SphereOptics& optics);

/// C6 from volume polarizabilities (α/(4πε0), m³) and ionization energies.
double c6_coefficient(double alpha_volume, double gas_alpha_volume, double ionization, double gas_ionization);
double c6_coefficient(const Particle& particle, const GasSpecies& gas);

double collision_rate(const EnvironmentParams& env, double c6);

struct SpectralRates {
  double absorption = 0.0;  // per unit angular frequency
  double scattering = 0.0;
};

/// Thermal absorption/scattering rate densities; zero outside the optical table.
SpectralRates spectral_rates(const SphereOptics& optics, const EnvironmentParams& env, double omega);

double emission_rate(const SphereOptics& optics, double omega, double internal_temperature);

/// Fixed composite Gauss-Legendre rule in log ω over the optical table's range,
/// with panels aligned to the table rows, carrying the optical response at
/// every node. Used for all blackbody integrals.
class SpectralGrid {
 public:
  explicit SpectralGrid(const SphereOptics& optics, double max_log_step = 0.05, int order = 8);

  std::size_t size() const noexcept { return omega_.size(); }
  const std::vector<double>& omega() const noexcept { return omega_; }
  const std::vector<double>& weight() const noexcept { return weight_; }
  const std::vector<double>& sigma_abs() const noexcept { return sigma_abs_; }
  const std::vector<double>& sigma_sca() const noexcept { return sigma_sca_; }
  const std::vector<double>& im_alpha_hat() const noexcept { return im_alpha_hat_; }

  /// ∫ ħω γ_emi(ω, T) dω, in W.
  double emitted_power(double internal_temperature) const;

 private:
  std::vector<double> omega_, weight_, sigma_abs_, sigma_sca_, im_alpha_hat_;
};

struct InternalTempTrajectory {
  std::vector<double> time;         // s, from the start of trapping
  std::vector<double> temperature;  // K
  double trap_end = 0.0;            // s

  /// Piecewise-linear interpolation, held constant outside the samples.
  double at(double t) const;
};

InternalTempTrajectory internal_temperature_trajectory(const Particle& particle, const TrapParams& trap,
                                                       const EnvironmentParams& env, double t1, double t2,
                                                       double max_step = 1e-3, double sample_interval = 1e-2);
InternalTempTrajectory internal_temperature_trajectory(const Particle& particle, const SpectralGrid& grid,
                                                       const TrapParams& trap, const EnvironmentParams& env,
                                                       double t1, double t2, double max_step = 1e-3,
                                                       double sample_interval = 1e-2);

/// Si(x)/x - 1, Si(2x)/x - sinc²x - 1 and sinc x - 1, accurate near zero.
double si_bracket_absorption(double x);
double si_bracket_scattering(double x);
double sinc_minus_one(double x);

/// ln R_n for the free-fall decoherence channels, frozen for one configuration.
class EnvironmentKernel {
 public:
  EnvironmentKernel(const Particle& particle, const EnvironmentParams& env, double t1, double t2,
                    double grating_period, DecoherenceChannels channels, ScatteringTimeConvention convention,
                    const InternalTempTrajectory& trajectory, const SpectralGrid& grid);

  double collision_rate() const noexcept { return gamma_coll_; }
  /// a_n / ω
  double a_per_omega(int n) const noexcept;
  double ln_r(int n) const;

 private:
  double t1_, t2_, mass_, period_;
  DecoherenceChannels channels_;
  ScatteringTimeConvention convention_;
  double gamma_coll_ = 0.0;
  std::vector<double> omega_, weight_;
  std::vector<double> gamma_abs_, gamma_sca_, emi_prefactor_;
  std::vector<double> theta_, theta_weight_;
  std::vector<double> inv_kt_first_, inv_kt_second_;  // ħ/(k_B T) along the two arms
};

}  // namespace talbot
