#pragma once

#include "talbot/numerics.hpp"
#include "talbot/optics.hpp"

namespace talbot {

struct GratingParams {
  double wavelength = 355e-9;   // m
  double energy_per_area = 0.0; // E_L/a_L, J/m^2

  double period() const noexcept { return 0.5 * wavelength; }
  double wavenumber() const noexcept;
  void validate() const;
};

/// Grating-interaction functions at separation s. `zeta_classical` is the
/// coherent term with sin(πs/d) replaced by πs/d.
struct EikonalQuantities {
  double zeta_coh = 0.0;
  double a = 0.0;
  double b = 0.0;
  double F = 0.0;
  double c_abs = 0.0;
  double zeta_classical = 0.0;
};

/// Everything about one sphere in one grating pulse that does not depend on s.
class GratingInteraction {
 public:
  GratingInteraction(const SphereOptics& optics, const GratingParams& grating, const QuadratureSpec& spec = {});

  const GratingParams& params() const noexcept { return grating_; }
  const AngularScattering& scattering() const noexcept { return scattering_; }
  /// Peak coherent phase φ0.
  double eikonal_phase() const noexcept { return phi0_; }
  EikonalQuantities at(double s) const;

 private:
  GratingParams grating_;
  QuadratureSpec spec_;
  AngularScattering scattering_;
  double phi0_ = 0.0;
  double photon_prefactor_ = 0.0;  // 8π (E_L/a_L)/(ħω) · 2π, per unit dimensionless weight
  double weight_scale_ = 0.0;      // scale dividing |f|^2-type integrands to O(1)
  double c_abs_peak_ = 0.0;        // c_abs at s = d
};

EikonalQuantities eikonal_quantities(const SphereOptics& optics, const GratingParams& grating, double s);
double eikonal_phase(const SphereOptics& optics, const GratingParams& grating);

/// Generalized Talbot coefficient B_n from the quantities at s = ξ d.
/// `extra_terms` widens the k-truncation for convergence checks.
double talbot_coefficient(const EikonalQuantities& eik, int n, int extra_terms = 0);

/// Same series with the linearized coherent term.
double classical_coefficient(const EikonalQuantities& eik, int n, int extra_terms = 0);

/// The series itself for explicit (ζ, a, b, F, c_abs).
double talbot_series(double zeta, double a, double b, double F, double c_abs, int n, int extra_terms = 0);

}  // namespace talbot
