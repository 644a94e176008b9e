#include "talbot/grating.hpp"

#include <cmath>
#include <complex>
#include <string>

#include "talbot/constants.hpp"
#include "talbot/errors.hpp"

namespace talbot {

using cplx = std::complex<double>;
using constants::pi;

double GratingParams::wavenumber() const noexcept { return 2.0 * pi / wavelength; }

void GratingParams::validate() const {
  if (!(wavelength > 0.0)) throw ConfigError("grating.wavelength must be positive");
  if (!(energy_per_area >= 0.0)) throw ConfigError("grating.energy_per_area must be non-negative");
}

GratingInteraction::GratingInteraction(const SphereOptics& optics, const GratingParams& grating,
                                       const QuadratureSpec& spec)
    : grating_(grating), spec_(spec), scattering_(optics, grating.wavenumber()) {
  grating_.validate();
  const double k = grating_.wavenumber();
  const double omega = k * constants::c;
  // Force per unit peak intensity at the steepest point; with four units of
  // peak intensity per unit single-beam intensity this gives
  // φ0 = 16 F_z(-λ/8) E_L / (ħ k a_L · 4).
  const double force = scattering_.standing_wave_force(-grating_.wavelength / 8.0, 1.0);
  phi0_ = 4.0 * force * grating_.energy_per_area / (constants::hbar * k);
  photon_prefactor_ = 8.0 * pi * grating_.energy_per_area / (constants::hbar * omega) * 2.0 * pi;
  weight_scale_ = scattering_.amplitude_squared(1.0);
  c_abs_peak_ = 4.0 * scattering_.cross_sections().absorption * grating_.wavelength * grating_.energy_per_area /
                (constants::h * constants::c);
}

EikonalQuantities GratingInteraction::at(double s) const {
  EikonalQuantities q;
  const double d = grating_.period();
  const double k = grating_.wavenumber();
  const double phase = pi * s / d;
  q.c_abs = c_abs_peak_ * (1.0 - std::cos(phase));
  q.zeta_coh = phi0_ * std::sin(phase);
  q.zeta_classical = phi0_ * phase;
  if (s == 0.0 || grating_.energy_per_area == 0.0 || weight_scale_ == 0.0) return q;

  const double ks = k * s;
  const double cos_ks = std::cos(ks);
  const int panels = 4 + static_cast<int>(std::ceil(std::abs(ks) / pi));
  const AngularScattering& sc = scattering_;
  const double w = weight_scale_;
  auto integral = [&](const Integrand& f) { return integrate(f, -1.0, 1.0, spec_, {}, panels).value; };

  const double a = integral([&](double mu) {
    return sc.backward_product(mu).real() / w * (std::cos(ks * mu) - cos_ks);
  });
  const double b = integral([&](double mu) { return sc.backward_product(mu).imag() / w * std::sin(ks * mu); });
  const double F = integral([&](double mu) { return sc.amplitude_squared(mu) / w * (std::cos((1.0 - mu) * ks) - 1.0); });
  const double scale = photon_prefactor_ * w;
  q.a = scale * a;
  q.b = scale * b;
  q.F = std::min(0.0, scale * F);
  return q;
}

EikonalQuantities eikonal_quantities(const SphereOptics& optics, const GratingParams& grating, double s) {
  return GratingInteraction(optics, grating).at(s);
}

double eikonal_phase(const SphereOptics& optics, const GratingParams& grating) {
  return GratingInteraction(optics, grating).eikonal_phase();
}

namespace {

cplx bessel_from(const std::vector<cplx>& seq, int order) {
  const int n = std::abs(order);
  const cplx v = seq[n];
  return (order < 0 && n % 2) ? -v : v;
}

}  // namespace

double talbot_series(double zeta, double a, double b, double F, double c_abs, int n, int extra_terms) {
  if (n < 0) n = -n;
  if (n > 200) throw ConfigError("Talbot coefficient order above 200");
  double A = a + 0.5 * c_abs;
  cplx arg = zeta;
  cplx log_w = 0.0;
  // A = 0 reduces the ratio to 1 exactly; otherwise ζ = A is a removable
  // singularity stepped over by a small offset.
  if (A != 0.0) {
    if (std::abs(zeta - A) < 1e-12) A += 1e-12;
    const double diff = zeta - A;
    const cplx root = std::sqrt(cplx(zeta * zeta - A * A, 0.0));
    arg = diff > 0.0 ? root : -root;
    log_w = 0.5 * std::log(cplx(zeta + A, 0.0) / cplx(diff, 0.0));
  }

  const int k_max = static_cast<int>(std::ceil(std::abs(b))) + static_cast<int>(std::ceil(std::abs(arg))) + 30 +
                    extra_terms;
  // With b = 0 only the k = 0 term survives.
  const int k_lo = b == 0.0 ? 0 : -k_max;
  const int k_hi = b == 0.0 ? 0 : k_max;
  const std::vector<cplx> jb = bessel_j_sequence(k_hi, cplx(b, 0.0));
  const std::vector<cplx> jarg = bessel_j_sequence(n + k_hi, arg);

  cplx sum = 0.0;
  double edge = 0.0;
  for (int k = k_lo; k <= k_hi; ++k) {
    const int m = n + k;
    const cplx jk = bessel_from(jb, k);
    const cplx jm = bessel_from(jarg, m);
    if (jk == cplx(0.0) || jm == cplx(0.0)) continue;
    const cplx term = jk * std::exp(static_cast<double>(m) * log_w + std::log(jm));
    sum += term;
    if (b != 0.0 && std::abs(k) >= k_max - 1) edge = std::max(edge, std::abs(term));
  }
  if (!std::isfinite(sum.real()) || !std::isfinite(sum.imag())) {
    throw NumericIntegrityError("Talbot coefficient series is not finite (n = " + std::to_string(n) + ")");
  }
  if (edge > 1e-10 * std::max(1.0, std::abs(sum))) {
    throw NumericIntegrityError("Talbot coefficient series not converged at k_max = " + std::to_string(k_max));
  }
  const double damping = std::exp(F - 0.5 * c_abs);
  const cplx value = damping * sum;
  if (std::abs(value.imag()) > 1e-9 * std::max(1.0, std::abs(value.real()))) {
    throw NumericIntegrityError("Talbot coefficient has imaginary residue " + std::to_string(value.imag()) +
                                " (n = " + std::to_string(n) + ")");
  }
  return value.real();
}

double talbot_coefficient(const EikonalQuantities& eik, int n, int extra_terms) {
  return talbot_series(eik.zeta_coh, eik.a, eik.b, eik.F, eik.c_abs, n, extra_terms);
}

double classical_coefficient(const EikonalQuantities& eik, int n, int extra_terms) {
  return talbot_series(eik.zeta_classical, eik.a, eik.b, eik.F, eik.c_abs, n, extra_terms);
}

}  // namespace talbot
