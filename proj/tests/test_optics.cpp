#include <doctest.h>

#include <boost/multiprecision/cpp_complex.hpp>
#include <cmath>
#include <complex>
#include <memory>
#include <numbers>

#include "talbot/constants.hpp"
#include "talbot/errors.hpp"
#include "talbot/numerics.hpp"
#include "talbot/optics.hpp"

using namespace talbot;
using cplx = std::complex<double>;
namespace mp = boost::multiprecision;

namespace {

constexpr double pi = std::numbers::pi;

std::shared_ptr<const OpticalTable> flat_table(cplx n) {
  return std::make_shared<OpticalTable>(std::vector<OpticalRow>{{1e-8, n.real(), n.imag()}, {1.0, n.real(), n.imag()}});
}

// Sphere of size parameter x at 355 nm with constant index n.
SphereOptics sphere(cplx n, double x, ScatteringRegime regime) {
  const double k = 2.0 * pi / 355e-9;
  return {x / k, flat_table(n), regime};
}

double k355() { return 2.0 * pi / 355e-9; }

// Lorenz-Mie coefficients from Riccati-Bessel functions built by upward
// recurrence in 100-digit complex arithmetic.
struct MieOracle {
  std::vector<cplx> a, b;
};

MieOracle mie_oracle(cplx m_d, double x_d, int orders) {
  using C = mp::cpp_complex_100;
  const C m(m_d.real(), m_d.imag());
  const C x(x_d, 0);
  const C mx = m * x;
  auto riccati_j = [&](const C& z) {
    std::vector<C> j(orders + 2);
    j[0] = sin(z) / z;
    j[1] = sin(z) / (z * z) - cos(z) / z;
    for (int n = 1; n <= orders; ++n) j[n + 1] = C(2 * n + 1) / z * j[n] - j[n - 1];
    std::vector<C> psi(orders + 2);
    for (int n = 0; n <= orders + 1; ++n) psi[n] = z * j[n];
    return psi;
  };
  std::vector<C> y(orders + 2);
  y[0] = -cos(x) / x;
  y[1] = -cos(x) / (x * x) - sin(x) / x;
  for (int n = 1; n <= orders; ++n) y[n + 1] = C(2 * n + 1) / x * y[n] - y[n - 1];
  const auto psi_x = riccati_j(x);
  const auto psi_mx = riccati_j(mx);
  MieOracle out;
  for (int n = 1; n <= orders; ++n) {
    const C xi = psi_x[n] + C(0, 1) * x * y[n];
    const C xi_prev = psi_x[n - 1] + C(0, 1) * x * y[n - 1];
    const C dpsi_x = psi_x[n - 1] - C(n) * psi_x[n] / x;
    const C dxi_x = xi_prev - C(n) * xi / x;
    const C dpsi_mx = psi_mx[n - 1] - C(n) * psi_mx[n] / mx;
    const C an = (m * psi_mx[n] * dpsi_x - psi_x[n] * dpsi_mx) / (m * psi_mx[n] * dxi_x - xi * dpsi_mx);
    const C bn = (psi_mx[n] * dpsi_x - m * psi_x[n] * dpsi_mx) / (psi_mx[n] * dxi_x - m * xi * dpsi_mx);
    out.a.emplace_back(static_cast<double>(an.real()), static_cast<double>(an.imag()));
    out.b.emplace_back(static_cast<double>(bn.real()), static_cast<double>(bn.imag()));
  }
  return out;
}

double integrate_over_sphere(const std::function<double(double)>& f) {
  return 2.0 * pi * integrate(f, -1.0, 1.0, {1e-12, 1e-300, 2000}, {}, 8).value;
}

}  // namespace

TEST_CASE("Clausius-Mossotti polarizability") {
  const double R = 1e-8;
  CHECK(std::abs(rayleigh_polarizability(R, 1.0)) == 0.0);
  const double conductor = 4.0 * pi * constants::eps0 * R * R * R;
  CHECK(rayleigh_polarizability(R, 1e6).real() == doctest::Approx(conductor).epsilon(1e-5));
  const cplx eps(11.7, 0.3);
  const cplx ratio = rayleigh_polarizability(2.0 * R, eps) / rayleigh_polarizability(R, eps);
  CHECK(ratio.real() == doctest::Approx(8.0).epsilon(1e-14));
  CHECK(std::abs(ratio.imag()) < 1e-14);
  CHECK_THROWS_AS(rayleigh_polarizability(R, -2.0), NumericIntegrityError);
}

TEST_CASE("regime selection and parsing") {
  const SphereOptics s = sphere(1.5, 0.1, ScatteringRegime::automatic);
  CHECK(s.regime_at(k355()) == ScatteringRegime::rayleigh);
  CHECK(s.regime_at(k355() * 1.01) == ScatteringRegime::mie);
  CHECK(parse_regime("auto") == ScatteringRegime::automatic);
  CHECK(to_string(parse_regime("mie")) == "mie");
  CHECK_THROWS_AS(parse_regime("dipole"), ConfigError);
}

TEST_CASE("Mie coefficients match the multiprecision Riccati-Bessel oracle") {
  for (cplx m : {cplx(1.5, 0.0), cplx(6.536, 2.6), cplx(1.4761, 0.0), cplx(3.476, 5e-9), cplx(1.33, 0.1)}) {
    for (double x : {0.05, 0.21, 1.0, 5.0, 20.0}) {
      const MieSolution sol(m, x);
      const MieOracle ref = mie_oracle(m, x, sol.orders());
      double scale = 0.0;
      for (int n = 1; n <= sol.orders(); ++n) scale = std::max({scale, std::abs(ref.a[n - 1]), std::abs(ref.b[n - 1])});
      for (int n = 1; n <= sol.orders(); ++n) {
        CHECK(std::abs(sol.a(n) - ref.a[n - 1]) <= 1e-10 * scale);
        CHECK(std::abs(sol.b(n) - ref.b[n - 1]) <= 1e-10 * scale);
      }
    }
  }
}

TEST_CASE("Mie series converges in the order count") {
  for (cplx m : {cplx(1.5, 0.0), cplx(6.536, 2.6)}) {
    for (double x : {0.21, 3.0, 15.0}) {
      const MieSolution base(m, x), more(m, x, 5);
      CHECK(std::abs(more.q_scattering() - base.q_scattering()) <= 1e-8 * base.q_scattering());
      CHECK(std::abs(more.q_extinction() - base.q_extinction()) <= 1e-8 * base.q_extinction());
      const auto [s1, s2] = base.amplitudes(0.3);
      const auto [t1, t2] = more.amplitudes(0.3);
      CHECK(std::abs(s1 - t1) <= 1e-8 * std::abs(s1));
      CHECK(std::abs(s2 - t2) <= 1e-8 * std::abs(s2));
    }
  }
}

TEST_CASE("cross sections") {
  for (ScatteringRegime r : {ScatteringRegime::rayleigh, ScatteringRegime::mie}) {
    const SphereOptics s = sphere(1.45, 0.2, r);
    const CrossSections cs = cross_sections(s, k355() * constants::c);
    CHECK(cs.absorption == 0.0);
    CHECK(cs.scattering > 0.0);
  }

  const cplx n21 = std::sqrt(cplx(2.1, 0.0));
  const SphereOptics mie = sphere(n21, 0.05, ScatteringRegime::mie);
  const SphereOptics ray = sphere(n21, 0.05, ScatteringRegime::rayleigh);
  const double w = k355() * constants::c;
  CHECK(cross_sections(mie, w).scattering == doctest::Approx(cross_sections(ray, w).scattering).epsilon(0.02));

  const SphereOptics tiny = sphere(1.5, 1e-3, ScatteringRegime::rayleigh);
  CHECK(cross_sections(tiny, 2.0 * w).scattering / cross_sections(tiny, w).scattering ==
        doctest::Approx(16.0).epsilon(1e-12));
  const SphereOptics tiny_mie = sphere(1.5, 1e-3, ScatteringRegime::mie);
  CHECK(cross_sections(tiny_mie, 2.0 * w).scattering / cross_sections(tiny_mie, w).scattering ==
        doctest::Approx(16.0).epsilon(1e-4));

  // SI dipole forms: σ_sca = k⁴|α|²/(6π ε0²), σ_abs = (k/ε0) Im α.
  const SphereOptics lossy = sphere({3.5, 0.2}, 0.05, ScatteringRegime::rayleigh);
  const cplx alpha = rayleigh_polarizability(lossy.radius, lossy.permittivity(w));
  const double k = k355();
  const CrossSections cs = cross_sections(lossy, w);
  CHECK(cs.scattering == doctest::Approx(std::pow(k, 4) * std::norm(alpha) /
                                         (6.0 * pi * constants::eps0 * constants::eps0)).epsilon(1e-12));
  CHECK(cs.absorption == doctest::Approx(k / constants::eps0 * alpha.imag()).epsilon(1e-12));
}

TEST_CASE("optical theorem and non-negativity in the Mie regime") {
  for (cplx m : {cplx(1.5, 0.0), cplx(6.536, 2.6), cplx(3.476, 1e-4), cplx(1.33, 0.5)}) {
    for (double x : {0.05, 0.21, 1.0, 8.0}) {
      const SphereOptics s = sphere(m, x, ScatteringRegime::mie);
      const AngularScattering as(s, k355());
      const CrossSections cs = as.cross_sections();
      CHECK(cs.scattering >= 0.0);
      CHECK(cs.absorption >= 0.0);
      CHECK(as.forward_extinction() == doctest::Approx(cs.scattering + cs.absorption).epsilon(1e-3));
    }
  }
}

TEST_CASE("scattering amplitude integrates to the scattering cross section") {
  for (ScatteringRegime r : {ScatteringRegime::rayleigh, ScatteringRegime::mie}) {
    for (cplx m : {cplx(1.5, 0.0), cplx(6.536, 2.6)}) {
      const double x = r == ScatteringRegime::rayleigh ? 0.08 : 2.5;
      const SphereOptics s = sphere(m, x, r);
      const AngularScattering as(s, k355());
      const double total = integrate_over_sphere([&](double nz) { return std::norm(as.amplitude(nz)); });
      CHECK(total == doctest::Approx(as.cross_sections().scattering).epsilon(1e-3));
      const double total2 = integrate_over_sphere([&](double nz) { return as.amplitude_squared(nz); });
      CHECK(total2 == doctest::Approx(as.cross_sections().scattering).epsilon(1e-3));
    }
  }
  const SphereOptics ray = sphere({3.5, 0.1}, 0.08, ScatteringRegime::rayleigh);
  for (double nz : {0.1, 0.5, 0.9}) {
    CHECK(std::abs(scattering_amplitude(ray, k355(), nz) - scattering_amplitude(ray, k355(), -nz)) == 0.0);
  }
  // Rayleigh amplitude: k²α/(4πε0) times the polarization-averaged angular factor.
  const double w = k355() * constants::c;
  const cplx alpha = rayleigh_polarizability(ray.radius, ray.permittivity(w));
  const cplx f = scattering_amplitude(ray, k355(), 0.4);
  const cplx want = k355() * k355() * alpha / (4.0 * pi * constants::eps0) * std::sqrt((1.0 + 0.16) / 2.0);
  CHECK(std::abs(f - want) <= 1e-12 * std::abs(want));
  CHECK_THROWS_AS(scattering_amplitude(ray, k355(), 1.5), ConfigError);
}

TEST_CASE("Mie forward amplitude approaches the Rayleigh value") {
  const cplx n21 = std::sqrt(cplx(2.1, 0.0));
  const cplx mie = scattering_amplitude(sphere(n21, 0.2, ScatteringRegime::mie), k355(), 1.0);
  const cplx ray = scattering_amplitude(sphere(n21, 0.2, ScatteringRegime::rayleigh), k355(), 1.0);
  CHECK(std::abs(mie - ray) <= 0.05 * std::abs(ray));
}

TEST_CASE("standing-wave force") {
  const double lambda = 355e-9;
  const double I = 1e12;
  for (ScatteringRegime r : {ScatteringRegime::rayleigh, ScatteringRegime::mie}) {
    const SphereOptics s = sphere({3.5, 0.1}, 0.1, r);
    const AngularScattering as(s, k355());
    const double peak = std::abs(as.standing_wave_force(-lambda / 8.0, I));
    CHECK(std::abs(as.standing_wave_force(0.0, I)) <= 1e-12 * peak);
    CHECK(std::abs(as.standing_wave_force(lambda / 4.0, I)) <= 1e-12 * peak);
    for (int i = 0; i < 64; ++i) {
      CHECK(std::abs(as.standing_wave_force(i * lambda / 128.0, I)) <= peak * (1.0 + 1e-12));
    }
    // Attraction towards the antinode at z = 0.
    CHECK(as.standing_wave_force(-lambda / 8.0, I) > 0.0);
  }

  const double k = k355();
  const SphereOptics r21 = sphere(std::sqrt(cplx(2.1, 0.0)), 0.05, ScatteringRegime::rayleigh);
  const cplx alpha = rayleigh_polarizability(r21.radius, r21.permittivity(k * constants::c));
  const double z = 0.03e-6;
  const double want = -(alpha.real() / (2.0 * constants::eps0 * constants::c)) * I * k * std::sin(2.0 * k * z);
  CHECK(standing_wave_force(r21, k, z, I) == doctest::Approx(want).epsilon(1e-12));

  const cplx n21 = std::sqrt(cplx(2.1, 0.0));
  const double f_mie = standing_wave_force(sphere(n21, 0.1, ScatteringRegime::mie), k, -lambda / 8.0, I);
  const double f_ray = standing_wave_force(sphere(n21, 0.1, ScatteringRegime::rayleigh), k, -lambda / 8.0, I);
  CHECK(f_mie == doctest::Approx(f_ray).epsilon(0.03));
  const double g_mie = standing_wave_force(sphere(n21, 0.005, ScatteringRegime::mie), k, -lambda / 8.0, I);
  const double g_ray = standing_wave_force(sphere(n21, 0.005, ScatteringRegime::rayleigh), k, -lambda / 8.0, I);
  CHECK(g_mie == doctest::Approx(g_ray).epsilon(1e-4));
}

TEST_CASE("particles") {
  Particle p{talbot::silicon(), 1e7 * constants::amu};
  CHECK_NOTHROW(p.validate());
  CHECK(p.heat_capacity() == doctest::Approx(p.mass * 700.0));
  CHECK(p.optics().radius == doctest::Approx(p.radius()));
  p.mass = -1.0;
  CHECK_THROWS_AS(p.validate(), ConfigError);
}
