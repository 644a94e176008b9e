#pragma once

#include <map>
#include <memory>
#include <mutex>

#include "talbot/numerics.hpp"

namespace talbot {

struct CslParams {
  double rate = 0.0;                // λ, 1/s
  double localization_length = 0;  // r_c, m

  void validate() const;
};

/// μ̃(q) of a homogeneous sphere, including the density, so μ̃(0) = m.
double form_factor(double radius, double density, double q);

/// Γ_CSL for a homogeneous sphere.
double csl_rate(const CslParams& params, double radius, double density, const QuadratureSpec& spec = {});

/// Saturation function normalized to f(0) = 0, f(∞) = 1. Independent of λ.
double csl_f(double x, const CslParams& params, double radius, double density, const QuadratureSpec& spec = {});

/// Displacement argument x_n = h n t1 t2 / (m d (t1 + t2)).
double csl_displacement(int n, double t1, double t2, double mass, double period);

double csl_kernel(int n, double t1, double t2, double mass, double period, const CslParams& params, double radius,
                  double density, const QuadratureSpec& spec = {});

/// Γ_CSL/λ and f(x) for one (r_c, R, ρ), with memoized f values. The rate
/// enters only as a factor, so one instance serves a whole column of a
/// (r_c, λ) scan. Safe for concurrent use.
class CslSaturation {
 public:
  CslSaturation(double localization_length, double radius, double density, const QuadratureSpec& spec = {});

  double rate_per_lambda() const noexcept { return rate_per_lambda_; }
  double f(double x) const;
  /// ln R_n^CSL for rate λ.
  double ln_kernel(double lambda, double x, double total_time) const;

 private:
  double r_c_, radius_, density_, mass_;
  QuadratureSpec spec_;
  double norm_ = 0.0;
  double rate_per_lambda_ = 0.0;
  mutable std::mutex mutex_;
  mutable std::map<double, double> cache_;
};

}  // namespace talbot
