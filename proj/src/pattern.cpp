#include "talbot/pattern.hpp"

#include <algorithm>
#include <cmath>

#include "talbot/constants.hpp"
#include "talbot/errors.hpp"

namespace talbot {

using constants::hbar;
using constants::pi;

void ScreenParams::validate() const {
  if (!(window > 0.0)) throw ConfigError("screen.window must be positive");
  if (samples < 201) throw ConfigError("screen.samples must be at least 201");
  if (samples % 2 == 0) throw ConfigError("screen.samples must be odd");
}

void ExperimentConfig::validate() const {
  particle.validate();
  trap.validate();
  grating.validate();
  if (!(t1 > 0.0)) throw ConfigError("times.t1 must be positive");
  if (!(t2 > 0.0)) throw ConfigError("times.t2 must be positive");
  env.validate();
  if (csl) csl->validate();
  if (sigma_x && !(*sigma_x > 0.0)) throw ConfigError("state.sigma_x must be positive");
  if (sigma_p && !(*sigma_p > 0.0)) throw ConfigError("state.sigma_p must be positive");
  if (sigma_p && !sigma_x) throw ConfigError("state.sigma_p requires state.sigma_x");
  if (sigma_x && sigma_p && *sigma_x * *sigma_p < 0.5 * hbar * (1.0 - 1e-12)) {
    throw ConfigError("state.sigma_x * state.sigma_p must be at least hbar/2");
  }
  screen.validate();
  if (!(aleph_threshold > 0.0 && aleph_threshold < 1.0)) throw ConfigError("analysis.threshold must lie in (0, 1)");
}

namespace {

double coth_factor(double nu, double temperature) {
  const double beta0 = constants::h / (2.0 * constants::k_B * temperature);
  return 1.0 / std::tanh(beta0 * nu);
}

}  // namespace

double thermal_sigma_x(double mass, double nu, double temperature) {
  const double gamma = pi * mass * nu;
  return std::sqrt(hbar / (4.0 * gamma) * coth_factor(nu, temperature));
}

double thermal_sigma_p(double mass, double nu, double temperature) {
  const double gamma = pi * mass * nu;
  return std::sqrt(hbar * gamma * coth_factor(nu, temperature));
}

DerivedScales derived_scales(const ExperimentConfig& config) {
  DerivedScales s;
  const double m = config.particle.mass;
  if (config.sigma_x) {
    s.sigma_x = *config.sigma_x;
    s.sigma_p = config.sigma_p ? *config.sigma_p : 0.5 * hbar / s.sigma_x;
  } else {
    s.sigma_x = thermal_sigma_x(m, config.trap.mech_frequency, config.trap.com_temperature);
    s.sigma_p = thermal_sigma_p(m, config.trap.mech_frequency, config.trap.com_temperature);
  }
  const double d = config.grating.period();
  s.talbot_time = m * d * d / constants::h;
  s.magnified_period = d * (config.t1 + config.t2) / config.t1;
  s.delta = m / (std::sqrt(2.0 * pi) * s.sigma_p * (config.t1 + config.t2));
  return s;
}

double PatternResult::evaluate(double x) const {
  double sum = 1.0;
  for (const KernelRow& r : components) sum += 2.0 * r.coefficient * std::cos(2.0 * pi * r.n * x / period);
  return delta * sum;
}

PatternEngine::PatternEngine(const ExperimentConfig& config) : config_(config) {
  config_.validate();
  scales_ = derived_scales(config_);
  const SphereOptics optics = config_.particle.optics();
  grating_ = std::make_unique<GratingInteraction>(optics, config_.grating);

  const DecoherenceChannels& ch = config_.channels;
  const bool needs_environment = ch.collisions || ch.absorption || ch.scattering || ch.emission;
  if (needs_environment) {
    spectral_.emplace(optics);
    if (ch.emission) {
      trajectory_ = internal_temperature_trajectory(config_.particle, *spectral_, config_.trap, config_.env,
                                                    config_.t1, config_.t2);
    } else {
      // Without the emission channel the temperature history is never read.
      trajectory_ = InternalTempTrajectory{{0.0}, {config_.env.temperature}, config_.trap.cooling_time};
    }
    environment_ = std::make_unique<EnvironmentKernel>(config_.particle, config_.env, config_.t1, config_.t2,
                                                       config_.grating.period(), ch, config_.scattering_convention,
                                                       *trajectory_, *spectral_);
  }
  if (config_.csl && config_.csl->rate > 0.0) {
    config_csl_ = std::make_unique<CslSaturation>(config_.csl->localization_length, config_.particle.radius(),
                                                  config_.particle.material.density);
  }
  rows_.resize(pattern_order_cap + 1);
}

double PatternEngine::collision_rate() const noexcept { return environment_ ? environment_->collision_rate() : 0.0; }

const PatternEngine::BaseRow& PatternEngine::row(int n) const {
  if (n < 0 || n > pattern_order_cap) throw ConfigError("pattern order out of range");
  {
    std::lock_guard<std::mutex> lock(mutex_);
    if (rows_[n]) return *rows_[n];
  }
  auto r = std::make_unique<BaseRow>();
  const double t1 = config_.t1, t2 = config_.t2;
  r->xi = n * t1 * t2 / ((t1 + t2) * scales_.talbot_time);
  EikonalQuantities eik = grating_->at(r->xi * config_.grating.period());
  if (!config_.grating_incoherent) {
    eik.a = eik.b = eik.F = eik.c_abs = 0.0;
  }
  r->quantum = talbot_coefficient(eik, n);
  r->classical = classical_coefficient(eik, n);
  r->ln_r_env = environment_ ? environment_->ln_r(n) : 0.0;
  const double u = n * pi * scales_.sigma_x * t2 / (scales_.magnified_period * t1);
  r->envelope = std::exp(-2.0 * u * u);
  std::lock_guard<std::mutex> lock(mutex_);
  if (!rows_[n]) rows_[n] = std::move(r);
  return *rows_[n];
}

double PatternEngine::xi(int n) const { return row(n).xi; }
double PatternEngine::talbot(int n, PatternKind kind) const {
  return kind == PatternKind::quantum ? row(n).quantum : row(n).classical;
}
double PatternEngine::ln_r_env(int n) const { return row(n).ln_r_env; }
double PatternEngine::envelope(int n) const { return row(n).envelope; }

PatternResult PatternEngine::pattern_without_csl(PatternKind kind) const {
  return pattern(kind, nullptr, -1.0);
}

PatternResult PatternEngine::pattern(PatternKind kind, const CslSaturation* csl, double csl_rate) const {
  // csl_rate < 0 marks an explicit request for no CSL at all.
  if (!csl && csl_rate >= 0.0 && config_csl_) {
    csl = config_csl_.get();
    csl_rate = config_.csl->rate;
  }
  const bool with_csl = csl && csl_rate > 0.0;
  PatternResult result;
  result.kind = kind;
  result.with_csl = with_csl;
  result.delta = scales_.delta;
  result.period = scales_.magnified_period;

  const double t1 = config_.t1, t2 = config_.t2;
  const double m = config_.particle.mass;
  const double d = config_.grating.period();
  double max_term = 0.0;
  int small_run = 0;
  bool stopped = false;
  for (int n = 1; n <= pattern_order_cap; ++n) {
    const BaseRow& base = row(n);
    KernelRow k;
    k.n = n;
    k.xi = base.xi;
    k.talbot = kind == PatternKind::quantum ? base.quantum : base.classical;
    k.envelope = base.envelope;
    double ln_r = base.ln_r_env;
    k.r_env = std::exp(base.ln_r_env);
    if (with_csl) {
      const double ln_csl = csl->ln_kernel(csl_rate, csl_displacement(n, t1, t2, m, d), t1 + t2);
      k.r_csl = std::exp(ln_csl);
      ln_r += ln_csl;
    }
    k.coefficient = k.talbot * k.envelope * std::exp(ln_r);
    if (!std::isfinite(k.coefficient)) {
      throw NumericIntegrityError("pattern coefficient at n = " + std::to_string(n) + " is not finite");
    }
    result.components.push_back(k);
    const double mag = std::abs(k.coefficient);
    max_term = std::max(max_term, mag);
    small_run = mag <= 1e-6 * max_term ? small_run + 1 : 0;
    if (small_run >= 3) {
      stopped = true;
      break;
    }
  }
  if (!stopped) {
    result.warnings.push_back("pattern series reached the order cap " + std::to_string(pattern_order_cap) +
                              " before converging");
  }

  const int samples = config_.screen.samples;
  const double L = config_.screen.window;
  result.x = Eigen::VectorXd::LinSpaced(samples, -0.5 * L, 0.5 * L);
  result.x((samples - 1) / 2) = 0.0;
  result.P.resize(samples);
  for (int i = 0; i < samples; ++i) result.P(i) = result.evaluate(result.x(i));
  if (!result.P.allFinite() || result.P.minCoeff() <= 0.0) {
    throw NumericIntegrityError("pattern is not strictly positive (min P/delta = " +
                                std::to_string(result.P.minCoeff() / result.delta) + ")");
  }
  return result;
}

PatternResult pattern_quantum(const ExperimentConfig& config) {
  return PatternEngine(config).pattern(PatternKind::quantum);
}

PatternResult pattern_classical(const ExperimentConfig& config) {
  return PatternEngine(config).pattern(PatternKind::classical);
}

double visibility(const PatternResult& p) {
  int n_max = 0;
  for (const KernelRow& r : p.components) n_max = std::max(n_max, r.n);
  const int samples = std::max(4001, 40 * n_max + 1);
  const Eigen::ArrayXd x = Eigen::ArrayXd::LinSpaced(samples, -0.5 * p.period, 0.5 * p.period);
  const Eigen::ArrayXd values = x.unaryExpr([&p](double v) { return p.evaluate(v); });
  const double hi = values.maxCoeff();
  const double lo = values.minCoeff();
  if (hi + lo <= 0.0) throw NumericIntegrityError("visibility of a non-positive pattern");
  return std::clamp((hi - lo) / (hi + lo), 0.0, 1.0);
}

double fourier_component(const PatternResult& p, int n) {
  if (n == 0) return p.delta;
  for (const KernelRow& r : p.components) {
    if (r.n == n) return 2.0 * p.delta * r.coefficient;
  }
  return 0.0;
}

double coherence_spread(double sigma_x, double mass, double tau) {
  if (!(sigma_x > 0.0) || !(mass > 0.0) || tau < 0.0) throw ConfigError("coherence_spread needs positive inputs");
  const double spread = hbar * tau / (2.0 * mass * sigma_x);
  return std::sqrt(sigma_x * sigma_x + spread * spread);
}

double t1_for_slits(int n_slits, double mass, double sigma_x, double period) {
  if (n_slits < 1 || !(mass > 0.0) || !(sigma_x > 0.0) || !(period > 0.0)) {
    throw ConfigError("t1_for_slits needs positive inputs");
  }
  const double target = n_slits * period;
  if (sigma_x >= target) return 0.0;
  // Solve σ_x(τ) = n d exactly; for σ_x ≪ n d this is 2 n d m σ_x / ħ.
  return 2.0 * mass * sigma_x * std::sqrt(target * target - sigma_x * sigma_x) / hbar;
}

double drop_length(double t1, double t2) {
  const double t = t1 + t2;
  return 0.5 * constants::g * t * t;
}

}  // namespace talbot
