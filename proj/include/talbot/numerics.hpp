#pragma once

#include <complex>
#include <functional>
#include <vector>

namespace talbot {

struct QuadratureSpec {
  double relative_tolerance = 1e-8;
  double absolute_tolerance = 1e-14;
  int max_subdivisions = 2000;

  void validate() const;
};

struct QuadratureResult {
  double value = 0.0;
  double error = 0.0;
  int subdivisions = 0;
};

using Integrand = std::function<double(double)>;

/// Globally adaptive Gauss-Kronrod (7/15) quadrature on [a, b]. The interval
/// is first cut at every entry of `breakpoints` that lies strictly inside it
/// and then into `initial_panels` equal pieces per segment. Throws
/// QuadratureError when the subdivision budget runs out.
QuadratureResult integrate(const Integrand& f, double a, double b, const QuadratureSpec& spec = {},
                           const std::vector<double>& breakpoints = {}, int initial_panels = 1);

/// ∫₀^∞ f for integrands damped on the scale σ; the domain is truncated at 30σ
/// and seeded with panels of width σ.
QuadratureResult integrate_damped_semiinf(const Integrand& f, double sigma, const QuadratureSpec& spec = {});

/// Nodes and weights of the n-point Gauss-Legendre rule on [-1, 1].
struct GaussLegendre {
  std::vector<double> nodes;
  std::vector<double> weights;
};
const GaussLegendre& gauss_legendre(int n);

double sine_integral(double x);

/// sin(x)/x with the removable singularity filled in.
double sinc(double x);

/// J_n(z) for integer n (negative orders via J_{-n} = (-1)^n J_n).
std::complex<double> bessel_j(int order, std::complex<double> z);

/// J_0(z) ... J_nmax(z) from a single recurrence.
std::vector<std::complex<double>> bessel_j_sequence(int nmax, std::complex<double> z);

double spherical_j1(double x);

double gamma_function(double x);

}  // namespace talbot
