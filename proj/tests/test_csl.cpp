#include <doctest.h>

#include <boost/math/quadrature/gauss.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <cmath>
#include <numbers>

#include "talbot/constants.hpp"
#include "talbot/csl.hpp"
#include "talbot/errors.hpp"

using namespace talbot;

namespace {

constexpr double pi = std::numbers::pi;
constexpr double rho = 2329.0;

double mass_of(double R) { return 4.0 / 3.0 * pi * rho * R * R * R; }

double gk(const std::function<double(double)>& f, double a, double b) {
  return boost::math::quadrature::gauss_kronrod<double, 61>::integrate(f, a, b, 20, 1e-13);
}

// Fixed 30-point Gauss rule; every piece below is shorter than half an
// oscillation, where the rule is exact to round-off.
double g30(const std::function<double(double)>& f, double a, double b) {
  return boost::math::quadrature::gauss<double, 30>::integrate(f, a, b);
}

double si_oracle(double z) {
  if (z == 0.0) return 0.0;
  const int pieces = 1 + static_cast<int>(z / pi);
  double sum = 0.0;
  for (int i = 0; i < pieces; ++i) {
    sum += g30([](double t) { return t == 0.0 ? 1.0 : std::sin(t) / t; }, z * i / pieces, z * (i + 1) / pieces);
  }
  return sum;
}

// Closed-form squared normalized form factor [3 (sin y - y cos y)/y³]².
double shape(double y) {
  if (y < 1e-3) return std::pow(1.0 - y * y / 10.0, 2);
  const double v = 3.0 * (std::sin(y) - y * std::cos(y)) / (y * y * y);
  return v * v;
}

// f(x) from nested quadrature in u = q r_c/ħ.
double f_oracle(double x, double r_c, double R) {
  const double beta = R / r_c, X = x / r_c;
  auto w = [&](double u) { return u * u * std::exp(-u * u) * shape(beta * u); };
  const int pieces = 8 + static_cast<int>(8.0 * X / pi);
  double num = 0.0, den = 0.0;
  for (int i = 0; i < pieces; ++i) {
    const double a = 8.0 * i / pieces, b = 8.0 * (i + 1) / pieces;
    num += g30([&](double u) { return w(u) * si_oracle(u * X); }, a, b);
    den += g30(w, a, b);
  }
  return 2.0 / pi * num / den;
}

}  // namespace

TEST_CASE("parameters") {
  CHECK_THROWS_AS((CslParams{-1.0, 1e-7}.validate()), ConfigError);
  CHECK_THROWS_AS((CslParams{1.0, 0.0}.validate()), ConfigError);
  CHECK_NOTHROW((CslParams{0.0, 1e-7}.validate()));
}

TEST_CASE("mass form factor") {
  const double R = 60e-9, m = mass_of(R), hbar = constants::hbar;
  CHECK(form_factor(R, rho, 0.0) == doctest::Approx(m).epsilon(1e-14));
  CHECK(form_factor(R, rho, 1e-6 * hbar / R) == doctest::Approx(m).epsilon(1e-9));
  CHECK(form_factor(R, rho, pi * hbar / R) == doctest::Approx(3.0 * m / (pi * pi)).epsilon(1e-12));
  for (int i = 0; i <= 400; ++i) {
    const double q = std::pow(10.0, -4.0 + 8.0 * i / 400.0) * hbar / R;
    CHECK(std::abs(form_factor(R, rho, q)) <= m * (1.0 + 1e-15));
  }
}

TEST_CASE("total rate") {
  const double r_c = 1e-7;
  CHECK(csl_rate({0.0, r_c}, 50e-9, rho) == 0.0);

  // Point particle: Γ = √2 λ (m/m0)².
  const double R = r_c / 200.0;
  const double ratio = mass_of(R) / constants::nucleon_mass;
  CHECK(csl_rate({1e-8, r_c}, R, rho) == doctest::Approx(std::sqrt(2.0) * 1e-8 * ratio * ratio).epsilon(1e-4));

  const double g1 = csl_rate({1e-10, r_c}, 60e-9, rho);
  CHECK(csl_rate({3e-10, r_c}, 60e-9, rho) == doctest::Approx(3.0 * g1).epsilon(1e-13));
  CHECK(csl_rate({2e-10, r_c}, 60e-9, rho) > g1);

  // Against the nested oracle of the q integral.
  const double beta = 0.6;
  const double norm = gk([&](double u) { return u * u * std::exp(-u * u) * shape(beta * u); }, 0.0, 12.0);
  const double want = 4.0 * std::sqrt(2.0 / pi) * std::pow(mass_of(60e-9) / constants::nucleon_mass, 2) * norm;
  CHECK(g1 / 1e-10 == doctest::Approx(want).epsilon(1e-8));

  // Subquadratic growth for R ≫ r_c.
  const double r_big = 10.0 * r_c;
  CHECK(csl_rate({1.0, r_c}, 2.0 * r_big, rho) / csl_rate({1.0, r_c}, r_big, rho) < 64.0 * 1.01);
}

TEST_CASE("saturation function") {
  const double r_c = 1e-7, R = 60e-9;
  const CslSaturation sat(r_c, R, rho);
  CHECK(sat.f(0.0) == 0.0);
  CHECK_THROWS_AS(sat.f(-1.0), ConfigError);
  CHECK(sat.f(1e4 * r_c) == doctest::Approx(1.0).epsilon(1e-4));
  CHECK(sat.f(r_c) < sat.f(2.0 * r_c));
  for (double X : {0.01, 0.3, 1.0, 2.5, 3.0, 6.0, 10.0, 40.0}) {
    CHECK(sat.f(X * r_c) == doctest::Approx(f_oracle(X * r_c, r_c, R)).epsilon(1e-7));
  }
  // Independent of λ and consistent with the free function.
  CHECK(csl_f(2.0 * r_c, {1e-5, r_c}, R, rho) == doctest::Approx(sat.f(2.0 * r_c)).epsilon(1e-14));
}

TEST_CASE("kernel examples") {
  const double t1 = 0.36, t2 = 0.18, d = 177.5e-9;
  const double R = 60e-9, m = mass_of(R);
  const CslParams off{0.0, 1e-7};
  for (int n = 0; n < 20; ++n) CHECK(csl_kernel(n, t1, t2, m, d, off, R, rho) == 1.0);

  const CslParams on{1e-12, 1e-7};
  const double gamma = csl_rate(on, R, rho);
  CHECK(csl_kernel(0, t1, t2, m, d, on, R, rho) == doctest::Approx(std::exp(-gamma * (t1 + t2))).epsilon(1e-14));
  CHECK(csl_displacement(3, t1, t2, m, d) ==
        doctest::Approx(3.0 * constants::h * t1 * t2 / (m * d * (t1 + t2))).epsilon(1e-15));

  // Plateau: R_n/R_0 → e^{Γ t} once x_n ≫ r_c; λ chosen so that Γ t = 1.
  const CslParams unit{on.rate / (gamma * (t1 + t2)), on.localization_length};
  const double x1 = csl_displacement(1, t1, t2, m, d);
  const int n_far = static_cast<int>(std::ceil(1e4 * on.localization_length / x1));
  const double plateau = csl_kernel(n_far, t1, t2, m, d, unit, R, rho) / csl_kernel(0, t1, t2, m, d, unit, R, rho);
  CHECK(std::log(plateau) == doctest::Approx(1.0).epsilon(1e-3));
}

TEST_CASE("kernel bounds and monotonicity") {
  // Strong enough that Γ t is of order one.
  const double t1 = 0.36, t2 = 0.18, d = 177.5e-9, R = 60e-9, m = mass_of(R);
  const double r_c = 1e-7;
  const double lambda = 1.0 / (csl_rate({1.0, r_c}, R, rho) * (t1 + t2));
  const CslSaturation sat(r_c, R, rho);
  double previous = 0.0;
  for (int i = 0; i <= 400; ++i) {
    const double kernel = std::exp(sat.ln_kernel(lambda, 0.1 * i * r_c, t1 + t2));
    CHECK(kernel > 0.0);
    CHECK(kernel <= 1.0);
    if (i > 0) CHECK(kernel >= previous);
    previous = kernel;
  }
  // The same through the per-order interface.
  const CslParams params{lambda, r_c};
  for (int n = 0; n <= 200; ++n) CHECK(csl_kernel(n, t1, t2, m, d, params, R, rho) <= 1.0);
}
