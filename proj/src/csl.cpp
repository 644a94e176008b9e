#include "talbot/csl.hpp"

#include <cmath>

#include "talbot/constants.hpp"
#include "talbot/errors.hpp"

namespace talbot {

using constants::hbar;
using constants::pi;

void CslParams::validate() const {
  if (!(rate >= 0.0)) throw ConfigError("csl.lambda must be non-negative");
  if (!(localization_length > 0.0)) throw ConfigError("csl.r_c must be positive");
}

namespace {

double sphere_mass(double radius, double density) { return 4.0 / 3.0 * pi * density * radius * radius * radius; }

// [3 j1(y)/y]², the squared normalized form factor.
double shape_weight(double y) {
  if (y == 0.0) return 1.0;
  const double v = 3.0 * spherical_j1(y) / y;
  return v * v;
}

// Oscillation-aware quadrature on [0, 30] in u = q r_c/ħ: panels narrow enough
// to resolve sin(u X) when X is large.
QuadratureResult integrate_u(const Integrand& f, double oscillation, const QuadratureSpec& spec) {
  if (oscillation <= 1.0) return integrate_damped_semiinf(f, 1.0, spec);
  // The weight u² e^{-u²} is below 1e-20 of its peak past u = 7.
  const double upper = 7.5;
  const int panels = static_cast<int>(std::ceil(upper * oscillation / pi)) + 30;
  QuadratureSpec relaxed = spec;
  relaxed.max_subdivisions = std::max(spec.max_subdivisions, 4 * panels);
  QuadratureResult body = integrate(f, 0.0, upper, relaxed, {}, panels);
  const QuadratureResult tail = integrate(f, upper, 30.0, spec, {}, 30);
  body.value += tail.value;
  body.error += tail.error;
  return body;
}

}  // namespace

double form_factor(double radius, double density, double q) {
  const double m = sphere_mass(radius, density);
  if (q == 0.0) return m;
  const double y = q * radius / hbar;
  return m * 3.0 * spherical_j1(y) / y;
}

CslSaturation::CslSaturation(double localization_length, double radius, double density, const QuadratureSpec& spec)
    : r_c_(localization_length), radius_(radius), density_(density), mass_(sphere_mass(radius, density)), spec_(spec) {
  if (!(r_c_ > 0.0)) throw ConfigError("csl.r_c must be positive");
  if (!(radius_ > 0.0) || !(density_ > 0.0)) throw ConfigError("CSL needs positive radius and density");
  const double beta = radius_ / r_c_;
  norm_ = integrate_damped_semiinf([beta](double u) { return u * u * std::exp(-u * u) * shape_weight(beta * u); },
                                   1.0, spec_)
              .value;
  const double ratio = mass_ / constants::nucleon_mass;
  rate_per_lambda_ = 4.0 * std::sqrt(2.0 / pi) * ratio * ratio * norm_;
}

double CslSaturation::f(double x) const {
  if (x < 0.0) throw ConfigError("csl_f needs x >= 0");
  if (x == 0.0) return 0.0;
  {
    std::lock_guard<std::mutex> lock(mutex_);
    if (auto it = cache_.find(x); it != cache_.end()) return it->second;
  }
  const double beta = radius_ / r_c_;
  const double X = x / r_c_;
  const double numerator =
      integrate_u([beta, X](double u) { return u * u * std::exp(-u * u) * shape_weight(beta * u) * sine_integral(u * X); },
                  X, spec_)
          .value;
  const double value = 2.0 / pi * numerator / norm_;
  std::lock_guard<std::mutex> lock(mutex_);
  cache_.emplace(x, value);
  return value;
}

double CslSaturation::ln_kernel(double lambda, double x, double total_time) const {
  if (lambda == 0.0) return 0.0;
  return lambda * rate_per_lambda_ * (f(x) - 1.0) * total_time;
}

double csl_rate(const CslParams& params, double radius, double density, const QuadratureSpec& spec) {
  params.validate();
  if (params.rate == 0.0) return 0.0;
  return params.rate * CslSaturation(params.localization_length, radius, density, spec).rate_per_lambda();
}

double csl_f(double x, const CslParams& params, double radius, double density, const QuadratureSpec& spec) {
  params.validate();
  return CslSaturation(params.localization_length, radius, density, spec).f(x);
}

double csl_displacement(int n, double t1, double t2, double mass, double period) {
  return constants::h * n * t1 * t2 / (mass * period * (t1 + t2));
}

double csl_kernel(int n, double t1, double t2, double mass, double period, const CslParams& params, double radius,
                  double density, const QuadratureSpec& spec) {
  params.validate();
  if (params.rate == 0.0) return 1.0;
  const CslSaturation sat(params.localization_length, radius, density, spec);
  return std::exp(sat.ln_kernel(params.rate, csl_displacement(n, t1, t2, mass, period), t1 + t2));
}

}  // namespace talbot
