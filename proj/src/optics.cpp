#include "talbot/optics.hpp"

#include <algorithm>
#include <cmath>

#include "talbot/constants.hpp"
#include "talbot/errors.hpp"

namespace talbot {

using cplx = std::complex<double>;
using constants::pi;

ScatteringRegime parse_regime(const std::string& text) {
  if (text == "rayleigh") return ScatteringRegime::rayleigh;
  if (text == "mie") return ScatteringRegime::mie;
  if (text == "auto") return ScatteringRegime::automatic;
  throw ConfigError("unknown scattering regime '" + text + "' (expected rayleigh, mie or auto)");
}

std::string to_string(ScatteringRegime regime) {
  switch (regime) {
    case ScatteringRegime::rayleigh: return "rayleigh";
    case ScatteringRegime::mie: return "mie";
    case ScatteringRegime::automatic: return "auto";
  }
  return "auto";
}

void Particle::validate() const {
  material.validate();
  if (!(mass > 0.0)) throw ConfigError("particle.mass must be positive");
}

cplx SphereOptics::permittivity(double omega) const {
  if (!table) throw ConfigError("sphere optics without optical table");
  return talbot::permittivity(*table, omega);
}

ScatteringRegime SphereOptics::regime_at(double k) const {
  if (regime != ScatteringRegime::automatic) return regime;
  return k * radius <= rayleigh_size_limit ? ScatteringRegime::rayleigh : ScatteringRegime::mie;
}

cplx clausius_mossotti(cplx eps) {
  const cplx denom = eps + 2.0;
  if (std::abs(denom) < 1e-12 * std::max(1.0, std::abs(eps))) {
    throw NumericIntegrityError("Clausius-Mossotti resonance at eps = -2");
  }
  return (eps - 1.0) / denom;
}

cplx rayleigh_polarizability(double radius, cplx eps) {
  return 4.0 * pi * constants::eps0 * radius * radius * radius * clausius_mossotti(eps);
}

int mie_order_count(double size_parameter) {
  return static_cast<int>(std::ceil(size_parameter + 4.0 * std::cbrt(size_parameter) + 2.0));
}

MieSolution::MieSolution(cplx m, double x, int extra_orders) : x_(x) {
  if (!(x > 0.0)) throw ConfigError("Mie size parameter must be positive");
  const int n_max = mie_order_count(x) + std::max(0, extra_orders);
  const cplx mx = m * x;

  // Logarithmic derivatives D_n(mx) and D_n(x) by downward recurrence. The
  // start error dies off across the turning point n ≈ |z| on the Airy scale
  // (|z|/2)^{1/3}, so the margin grows with |z|^{1/3}.
  const double z_max = std::max(std::abs(mx), x);
  const int n_start = static_cast<int>(std::ceil(std::max<double>(n_max, z_max) + 16.0 + 15.0 * std::cbrt(z_max)));
  std::vector<cplx> d_mx(n_start + 1, 0.0);
  std::vector<double> d_x(n_start + 1, 0.0);
  for (int n = n_start; n >= 1; --n) {
    d_mx[n - 1] = static_cast<double>(n) / mx - 1.0 / (d_mx[n] + static_cast<double>(n) / mx);
    d_x[n - 1] = n / x - 1.0 / (d_x[n] + n / x);
  }

  a_.resize(n_max);
  b_.resize(n_max);
  double psi_prev = std::sin(x);  // ψ_0
  double chi_prev = std::cos(x);  // χ_0
  double chi_prev2 = -std::sin(x);  // χ_{-1}
  double sum_sca = 0.0;
  double sum_ext = 0.0;
  for (int n = 1; n <= n_max; ++n) {
    const double psi = psi_prev / (d_x[n] + n / x);
    const double chi = (2.0 * n - 1.0) / x * chi_prev - chi_prev2;
    const cplx xi(psi, -chi);
    const cplx xi_prev(psi_prev, -chi_prev);
    const cplx ta = d_mx[n] / m + static_cast<double>(n) / x;
    const cplx tb = m * d_mx[n] + static_cast<double>(n) / x;
    a_[n - 1] = (ta * psi - psi_prev) / (ta * xi - xi_prev);
    b_[n - 1] = (tb * psi - psi_prev) / (tb * xi - xi_prev);
    sum_sca += (2.0 * n + 1.0) * (std::norm(a_[n - 1]) + std::norm(b_[n - 1]));
    sum_ext += (2.0 * n + 1.0) * (a_[n - 1] + b_[n - 1]).real();
    psi_prev = psi;
    chi_prev2 = chi_prev;
    chi_prev = chi;
  }
  q_sca_ = 2.0 / (x * x) * sum_sca;
  q_ext_ = 2.0 / (x * x) * sum_ext;
}

cplx MieSolution::a(int n) const noexcept {
  return (n >= 1 && n <= orders()) ? a_[n - 1] : cplx(0.0);
}

cplx MieSolution::b(int n) const noexcept {
  return (n >= 1 && n <= orders()) ? b_[n - 1] : cplx(0.0);
}

std::pair<cplx, cplx> MieSolution::amplitudes(double mu) const {
  cplx s1 = 0.0;
  cplx s2 = 0.0;
  double pi_prev = 0.0;  // π_0
  double pi_n = 1.0;     // π_1
  for (int n = 1; n <= orders(); ++n) {
    const double tau = n * mu * pi_n - (n + 1.0) * pi_prev;
    const double weight = (2.0 * n + 1.0) / (n * (n + 1.0));
    s1 += weight * (a_[n - 1] * pi_n + b_[n - 1] * tau);
    s2 += weight * (a_[n - 1] * tau + b_[n - 1] * pi_n);
    const double pi_next = ((2.0 * n + 1.0) * mu * pi_n - (n + 1.0) * pi_prev) / n;
    pi_prev = pi_n;
    pi_n = pi_next;
  }
  return {s1, s2};
}

AngularScattering::AngularScattering(const SphereOptics& optics, double k, int extra_mie_orders)
    : regime_(optics.regime_at(k)), k_(k), radius_(optics.radius) {
  if (!(k > 0.0)) throw ConfigError("wavenumber must be positive");
  if (!(radius_ > 0.0)) throw ConfigError("sphere radius must be positive");
  if (!optics.table) throw ConfigError("sphere optics without optical table");
  const cplx n = optics.table->refractive_index(2.0 * pi / k);
  eps_ = n * n;
  const double x = k * radius_;
  if (regime_ == ScatteringRegime::rayleigh) {
    alpha_hat_ = clausius_mossotti(eps_);
    const double r3 = radius_ * radius_ * radius_;
    sections_.scattering = 8.0 * pi / 3.0 * std::pow(k, 4) * r3 * r3 * std::norm(alpha_hat_);
    sections_.absorption = 4.0 * pi * k * r3 * alpha_hat_.imag();
    sections_.extinction = sections_.scattering + sections_.absorption;
  } else {
    mie_.emplace(n, x, extra_mie_orders);
    const double area = pi * radius_ * radius_;
    sections_.scattering = mie_->q_scattering() * area;
    sections_.extinction = mie_->q_extinction() * area;
    sections_.absorption = std::max(0.0, sections_.extinction - sections_.scattering);
    if (eps_.imag() == 0.0) sections_.absorption = 0.0;
  }
}

namespace {

std::pair<cplx, cplx> rayleigh_amplitudes(double x, cplx alpha_hat, double mu) {
  const cplx s1 = cplx(0.0, -1.0) * x * x * x * alpha_hat;
  return {s1, s1 * mu};
}

}  // namespace

double AngularScattering::forward_extinction() const {
  const double x = k_ * radius_;
  const cplx s0 = mie_ ? mie_->amplitudes(1.0).first : rayleigh_amplitudes(x, alpha_hat_, 1.0).first;
  return 4.0 * pi / (k_ * k_) * s0.real();
}

cplx AngularScattering::amplitude(double nz) const {
  if (std::abs(nz) > 1.0) throw ConfigError("direction cosine outside [-1, 1]");
  const auto [s1, s2] = mie_ ? mie_->amplitudes(nz) : rayleigh_amplitudes(k_ * radius_, alpha_hat_, nz);
  const double magnitude = std::sqrt(0.5 * (std::norm(s1) + std::norm(s2))) / k_;
  const cplx ref = s1 / cplx(0.0, -1.0);
  if (std::abs(ref) == 0.0) return magnitude;
  return magnitude * ref / std::abs(ref);
}

double AngularScattering::amplitude_squared(double nz) const {
  const auto [s1, s2] = mie_ ? mie_->amplitudes(nz) : rayleigh_amplitudes(k_ * radius_, alpha_hat_, nz);
  return 0.5 * (std::norm(s1) + std::norm(s2)) / (k_ * k_);
}

cplx AngularScattering::backward_product(double nz) const {
  const double x = k_ * radius_;
  const auto [s1, s2] = mie_ ? mie_->amplitudes(nz) : rayleigh_amplitudes(x, alpha_hat_, nz);
  const auto [r1, r2] = mie_ ? mie_->amplitudes(-nz) : rayleigh_amplitudes(x, alpha_hat_, -nz);
  return (std::conj(s1) * r1 - std::conj(s2) * r2) / (2.0 * k_ * k_);
}

double AngularScattering::standing_wave_force(double z, double intensity_norm) const {
  if (!mie_) {
    const double r3 = radius_ * radius_ * radius_;
    return -(4.0 * pi * r3 * alpha_hat_.real() / (2.0 * constants::c)) * intensity_norm * k_ *
           std::sin(2.0 * k_ * z);
  }
  // Two counter-propagating plane waves; on-axis beam-shape coefficients of
  // the sum, then the multipole expression for the axial force.
  const cplx fwd = std::exp(cplx(0.0, k_ * z));
  const cplx bwd = std::exp(cplx(0.0, -k_ * z));
  auto g_tm = [&](int n) { return fwd + (n % 2 ? 1.0 : -1.0) * bwd; };
  auto g_te = [&](int n) { return fwd + (n % 2 ? -1.0 : 1.0) * bwd; };
  double sum = 0.0;
  for (int n = 1; n <= mie_->orders(); ++n) {
    const cplx an = mie_->a(n), an1 = mie_->a(n + 1);
    const cplx bn = mie_->b(n), bn1 = mie_->b(n + 1);
    const double c1 = n * (n + 2.0) / (n + 1.0);
    const double c2 = (2.0 * n + 1.0) / (n * (n + 1.0));
    sum += c1 * ((an + std::conj(an1) - 2.0 * an * std::conj(an1)) * g_tm(n) * std::conj(g_tm(n + 1))).real();
    sum += c1 * ((bn + std::conj(bn1) - 2.0 * bn * std::conj(bn1)) * g_te(n) * std::conj(g_te(n + 1))).real();
    sum += c2 * ((an + std::conj(bn) - 2.0 * an * std::conj(bn)) * g_tm(n) * std::conj(g_te(n))).real();
  }
  return intensity_norm / (4.0 * constants::c) * (2.0 * pi / (k_ * k_)) * sum;
}

CrossSections cross_sections(const SphereOptics& optics, double omega) {
  return AngularScattering(optics, omega / constants::c).cross_sections();
}

cplx scattering_amplitude(const SphereOptics& optics, double k, double nz) {
  return AngularScattering(optics, k).amplitude(nz);
}

double standing_wave_force(const SphereOptics& optics, double k, double z, double intensity_norm) {
  return AngularScattering(optics, k).standing_wave_force(z, intensity_norm);
}

}  // namespace talbot
