#include "talbot/environment.hpp"

#include <algorithm>
#include <cmath>

#include "talbot/constants.hpp"
#include "talbot/errors.hpp"
#include "talbot/numerics.hpp"

namespace talbot {

using constants::hbar;
using constants::k_B;
using constants::pi;

double EnvironmentParams::mean_velocity() const {
  if (gas_velocity > 0.0) return gas_velocity;
  return std::sqrt(2.0 * k_B * temperature / gas.mass);
}

void EnvironmentParams::validate() const {
  if (!(temperature > 0.0)) throw ConfigError("environment.temperature must be positive");
  if (!(pressure >= 0.0)) throw ConfigError("environment.pressure must be non-negative");
  if (gas_velocity < 0.0) throw ConfigError("environment.gas_velocity must be positive");
  gas.validate();
}

void TrapParams::validate() const {
  if (!(wavelength > 0.0)) throw ConfigError("trap.wavelength must be positive");
  if (!(cooling_time > 0.0)) throw ConfigError("trap.cooling_time must be positive");
  if (!(intensity >= 0.0)) throw ConfigError("trap.intensity must be non-negative");
  if (!(mech_frequency > 0.0)) throw ConfigError("trap.mech_frequency must be positive");
  if (!(com_temperature > 0.0)) throw ConfigError("trap.com_temperature must be positive");
}

ScatteringTimeConvention parse_scattering_convention(const std::string& text) {
  if (text == "as-printed") return ScatteringTimeConvention::as_printed;
  if (text == "symmetric") return ScatteringTimeConvention::symmetric;
  throw ConfigError("unknown scattering_time_convention '" + text + "' (expected as-printed or symmetric)");
}

std::string to_string(ScatteringTimeConvention convention) {
  return convention == ScatteringTimeConvention::symmetric ? "symmetric" : "as-printed";
}

double static_polarizability_volume(const SphereOptics& optics) {
  const auto& rows = optics.table->rows();
  const std::complex<double> n(rows.back().n_real, rows.back().n_imag);
  const double r = optics.radius;
  return r * r * r * clausius_mossotti(n * n).real();
}

double c6_coefficient(double alpha_volume, double gas_alpha_volume, double ionization, double gas_ionization) {
  // 3 α α_g I I_g / (32 π² ε0² (I + I_g)) with α = 4π ε0 α_volume.
  return 1.5 * alpha_volume * gas_alpha_volume * ionization * gas_ionization / (ionization + gas_ionization);
}

double c6_coefficient(const Particle& particle, const GasSpecies& gas) {
  return c6_coefficient(static_polarizability_volume(particle.optics()), gas.polarizability_volume,
                        particle.material.ionization_energy, gas.ionization_energy);
}

double collision_rate(const EnvironmentParams& env, double c6) {
  if (env.pressure == 0.0) return 0.0;
  const double v = env.mean_velocity();
  const double prefactor = 4.0 * pi * gamma_function(0.9) / (5.0 * std::sin(pi / 5.0));
  const double cross_section = std::pow(3.0 * pi * c6 / (2.0 * hbar * v), 0.4);
  return prefactor * cross_section * env.pressure * v / (k_B * env.temperature);
}

namespace {

double bose(double omega, double temperature) {
  if (!(temperature > 0.0)) return 0.0;
  return 1.0 / std::expm1(hbar * omega / (k_B * temperature));
}

double boltzmann(double omega, double temperature) {
  if (!(temperature > 0.0)) return 0.0;
  return std::exp(-hbar * omega / (k_B * temperature));
}

double mode_density(double omega) {
  const double r = omega / (pi * constants::c);
  return r * r;
}

}  // namespace

SpectralRates spectral_rates(const SphereOptics& optics, const EnvironmentParams& env, double omega) {
  if (omega < optics.table->min_omega() || omega > optics.table->max_omega()) return {};
  const CrossSections cs = AngularScattering(optics, omega / constants::c).cross_sections();
  const double factor = mode_density(omega) * bose(omega, env.temperature);
  return {factor * cs.absorption, factor * cs.scattering};
}

double emission_rate(const SphereOptics& optics, double omega, double internal_temperature) {
  const AngularScattering sc(optics, omega / constants::c);
  return mode_density(omega) * sc.cross_sections().absorption * boltzmann(omega, internal_temperature) *
         clausius_mossotti(sc.permittivity()).imag();
}

SpectralGrid::SpectralGrid(const SphereOptics& optics, double max_log_step, int order) {
  const auto& rows = optics.table->rows();
  const GaussLegendre& gl = gauss_legendre(order);
  // Table rows run up in wavelength, so down in ω; walk them in reverse.
  for (std::size_t i = rows.size() - 1; i > 0; --i) {
    const double lo = std::log(2.0 * pi * constants::c / rows[i].wavelength);
    const double hi = std::log(2.0 * pi * constants::c / rows[i - 1].wavelength);
    const int panels = std::max(1, static_cast<int>(std::ceil((hi - lo) / max_log_step)));
    const double width = (hi - lo) / panels;
    for (int p = 0; p < panels; ++p) {
      const double center = lo + (p + 0.5) * width;
      for (int j = 0; j < order; ++j) {
        const double u = center + 0.5 * width * gl.nodes[j];
        const double omega = std::exp(u);
        omega_.push_back(omega);
        weight_.push_back(0.5 * width * gl.weights[j] * omega);
      }
    }
  }
  sigma_abs_.reserve(omega_.size());
  sigma_sca_.reserve(omega_.size());
  im_alpha_hat_.reserve(omega_.size());
  for (double omega : omega_) {
    const AngularScattering sc(optics, omega / constants::c);
    const CrossSections cs = sc.cross_sections();
    sigma_abs_.push_back(cs.absorption);
    sigma_sca_.push_back(cs.scattering);
    im_alpha_hat_.push_back(clausius_mossotti(sc.permittivity()).imag());
  }
}

double SpectralGrid::emitted_power(double internal_temperature) const {
  if (!(internal_temperature > 0.0)) return 0.0;
  const double beta = hbar / (k_B * internal_temperature);
  double power = 0.0;
  for (std::size_t i = 0; i < omega_.size(); ++i) {
    const double w = omega_[i];
    power += weight_[i] * hbar * w * mode_density(w) * sigma_abs_[i] * im_alpha_hat_[i] * std::exp(-beta * w);
  }
  return power;
}

double InternalTempTrajectory::at(double t) const {
  if (time.empty()) throw NumericIntegrityError("empty temperature trajectory");
  if (t <= time.front()) return temperature.front();
  if (t >= time.back()) return temperature.back();
  const auto upper = std::upper_bound(time.begin(), time.end(), t);
  const std::size_t i = static_cast<std::size_t>(upper - time.begin());
  const double u = (t - time[i - 1]) / (time[i] - time[i - 1]);
  return temperature[i - 1] + u * (temperature[i] - temperature[i - 1]);
}

InternalTempTrajectory internal_temperature_trajectory(const Particle& particle, const TrapParams& trap,
                                                       const EnvironmentParams& env, double t1, double t2,
                                                       double max_step, double sample_interval) {
  const SpectralGrid grid(particle.optics());
  return internal_temperature_trajectory(particle, grid, trap, env, t1, t2, max_step, sample_interval);
}

InternalTempTrajectory internal_temperature_trajectory(const Particle& particle, const SpectralGrid& grid,
                                                       const TrapParams& trap, const EnvironmentParams& env,
                                                       double t1, double t2, double max_step,
                                                       double sample_interval) {
  trap.validate();
  env.validate();
  if (!(t1 >= 0.0) || !(t2 >= 0.0)) throw ConfigError("free-fall times must be non-negative");
  if (!(max_step > 0.0) || !(sample_interval > 0.0)) throw ConfigError("trajectory steps must be positive");

  const double heat_capacity = particle.heat_capacity();
  const double trap_k = 2.0 * pi / trap.wavelength;
  const double absorbed =
      AngularScattering(particle.optics(), trap_k).cross_sections().absorption * trap.intensity;
  const double t_c = trap.cooling_time;
  auto rate = [&](double t, double temp) {
    const double heating = t < t_c ? absorbed : 0.0;
    return (heating - grid.emitted_power(temp)) / heat_capacity;
  };
  auto rk4 = [&](double t, double temp, double h) {
    const double k1 = rate(t, temp);
    const double k2 = rate(t + 0.5 * h, temp + 0.5 * h * k1);
    const double k3 = rate(t + 0.5 * h, temp + 0.5 * h * k2);
    const double k4 = rate(t + h, temp + h * k3);
    return temp + h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
  };

  const double total = t_c + t1 + t2;
  const int samples = std::max(1, static_cast<int>(std::ceil(total / sample_interval - 1e-9)));
  const double interval = total / samples;
  const int sub = std::max(1, static_cast<int>(std::ceil(interval / max_step - 1e-9)));
  const double h = interval / sub;

  InternalTempTrajectory traj;
  traj.trap_end = t_c;
  traj.time.reserve(samples + 1);
  traj.temperature.reserve(samples + 1);
  double temp = env.temperature;
  traj.time.push_back(0.0);
  traj.temperature.push_back(temp);
  for (int s = 0; s < samples; ++s) {
    for (int j = 0; j < sub; ++j) {
      const double t = s * interval + j * h;
      if (t < t_c && t + h > t_c) {
        // Split the step at the end of trapping so the heating switch-off is exact.
        temp = rk4(t, temp, t_c - t);
        temp = rk4(t_c, temp, t + h - t_c);
      } else {
        temp = rk4(t, temp, h);
      }
      if (!std::isfinite(temp) || temp <= 0.0) {
        throw NumericIntegrityError("internal temperature integration unstable at t = " + std::to_string(t));
      }
    }
    traj.time.push_back((s + 1) * interval);
    traj.temperature.push_back(temp);
  }
  return traj;
}

double si_bracket_absorption(double x) {
  const double ax = std::abs(x);
  if (ax < 1e-3) {
    const double x2 = x * x;
    return -x2 / 18.0 + x2 * x2 / 600.0;
  }
  return sine_integral(ax) / ax - 1.0;
}

double si_bracket_scattering(double x) {
  const double ax = std::abs(x);
  if (ax < 1e-3) {
    const double x2 = x * x;
    return -x2 / 9.0 + 2.0 * x2 * x2 / 225.0;
  }
  const double s = std::sin(ax) / ax;
  return sine_integral(2.0 * ax) / ax - s * s - 1.0;
}

double sinc_minus_one(double x) {
  const double ax = std::abs(x);
  if (ax < 1e-3) {
    const double x2 = x * x;
    return -x2 / 6.0 + x2 * x2 / 120.0;
  }
  return std::sin(ax) / ax - 1.0;
}

EnvironmentKernel::EnvironmentKernel(const Particle& particle, const EnvironmentParams& env, double t1, double t2,
                                     double grating_period, DecoherenceChannels channels,
                                     ScatteringTimeConvention convention, const InternalTempTrajectory& trajectory,
                                     const SpectralGrid& grid)
    : t1_(t1),
      t2_(t2),
      mass_(particle.mass),
      period_(grating_period),
      channels_(channels),
      convention_(convention),
      omega_(grid.omega()),
      weight_(grid.weight()) {
  env.validate();
  if (!(t1 > 0.0) || !(t2 > 0.0)) throw ConfigError("times.t1 and times.t2 must be positive");
  if (channels_.collisions) gamma_coll_ = talbot::collision_rate(env, c6_coefficient(particle, env.gas));

  const std::size_t n = omega_.size();
  gamma_abs_.resize(n);
  gamma_sca_.resize(n);
  emi_prefactor_.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double w = omega_[i];
    const double thermal = mode_density(w) * bose(w, env.temperature);
    gamma_abs_[i] = thermal * grid.sigma_abs()[i];
    gamma_sca_[i] = thermal * grid.sigma_sca()[i];
    emi_prefactor_[i] = mode_density(w) * grid.sigma_abs()[i] * grid.im_alpha_hat()[i];
  }

  const GaussLegendre& gl = gauss_legendre(16);
  const double t_c = trajectory.trap_end;
  for (int j = 0; j < 16; ++j) {
    const double theta = 0.5 * (gl.nodes[j] + 1.0);
    theta_.push_back(theta);
    theta_weight_.push_back(0.5 * gl.weights[j]);
    const double first = trajectory.at(t_c + t1 - t1 * theta);
    const double second = trajectory.at(t_c + t1 + t2 * theta);
    inv_kt_first_.push_back(first > 0.0 ? hbar / (k_B * first) : INFINITY);
    inv_kt_second_.push_back(second > 0.0 ? hbar / (k_B * second) : INFINITY);
  }
}

double EnvironmentKernel::a_per_omega(int n) const noexcept {
  return n * constants::h * t1_ * t2_ / ((t1_ + t2_) * mass_ * constants::c * period_);
}

double EnvironmentKernel::ln_r(int n) const {
  const double total_time = t1_ + t2_;
  double result = 0.0;
  if (channels_.collisions) result -= gamma_coll_ * total_time;
  if (n == 0) return result;

  const double scattering_time =
      convention_ == ScatteringTimeConvention::symmetric ? t1_ + t2_ : t1_ - t2_;
  const double a_scale = a_per_omega(n);
  double absorption = 0.0, scattering = 0.0, emission = 0.0;
  for (std::size_t i = 0; i < omega_.size(); ++i) {
    const double w = omega_[i];
    const double a = a_scale * w;
    if (channels_.absorption) absorption += weight_[i] * gamma_abs_[i] * si_bracket_absorption(a);
    if (channels_.scattering) scattering += weight_[i] * gamma_sca_[i] * si_bracket_scattering(a);
    if (channels_.emission && emi_prefactor_[i] != 0.0) {
      double inner = 0.0;
      for (std::size_t j = 0; j < theta_.size(); ++j) {
        const double occupation = t1_ * std::exp(-inv_kt_first_[j] * w) + t2_ * std::exp(-inv_kt_second_[j] * w);
        inner += theta_weight_[j] * occupation * sinc_minus_one(a * theta_[j]);
      }
      emission += weight_[i] * emi_prefactor_[i] * inner;
    }
  }
  result += absorption * total_time + scattering * scattering_time + emission;
  return result;
}

}  // namespace talbot
