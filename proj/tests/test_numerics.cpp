#include <doctest.h>

#include <boost/math/special_functions/gamma.hpp>
#include <boost/multiprecision/cpp_bin_float.hpp>
#include <boost/multiprecision/cpp_complex.hpp>
#include <cmath>
#include <complex>
#include <numbers>
#include <random>

#include "talbot/errors.hpp"
#include "talbot/numerics.hpp"

using namespace talbot;
namespace mp = boost::multiprecision;

namespace {

using Wide = mp::number<mp::cpp_bin_float<600>>;
using WideComplex = mp::cpp_complex_100;

// Power series Si(x) = Σ (-1)^k x^{2k+1} / ((2k+1)(2k+1)!), summed in 600 digits.
double si_oracle(double xd) {
  const Wide x = xd;
  const Wide x2 = x * x;
  Wide term = x;  // x^{2k+1}/(2k+1)!
  Wide sum = 0;
  for (int k = 0; k < 5000; ++k) {
    const Wide add = term / (2 * k + 1);
    sum += (k % 2 == 0) ? add : Wide(-add);
    if (k > 10 && abs(add) < Wide("1e-40") * (1 + abs(sum))) break;
    term *= x2 / ((2 * k + 2) * (2 * k + 3));
  }
  return static_cast<double>(sum);
}

// J_n(z) = (z/2)^n Σ (-z²/4)^k / (k! (n+k)!), summed with 100 digits.
std::complex<double> bessel_oracle(int n, std::complex<double> zd) {
  const WideComplex z(zd.real(), zd.imag());
  const WideComplex q = -(z * z) / 4;
  WideComplex term = 1;
  for (int i = 1; i <= n; ++i) term *= z / (2 * i);
  WideComplex sum = 0;
  for (int k = 0; k < 2000; ++k) {
    sum += term;
    if (k > 5 && abs(term) < mp::cpp_bin_float_100("1e-60") * abs(sum)) break;
    term *= q / ((k + 1) * (n + k + 1));
  }
  return {static_cast<double>(sum.real()), static_cast<double>(sum.imag())};
}

double rel_err(std::complex<double> got, std::complex<double> want) { return std::abs(got - want) / std::abs(want); }

}  // namespace

TEST_CASE("sine integral examples") {
  CHECK(sine_integral(0.0) == 0.0);
  CHECK(std::abs(sine_integral(1.0) - si_oracle(1.0)) < 1e-15);
  CHECK(si_oracle(1.0) == doctest::Approx(0.946083070367).epsilon(1e-12));
  CHECK(std::abs(sine_integral(1e6) - std::numbers::pi / 2) < 2e-6);
}

TEST_CASE("sine integral matches the series oracle to 1e-12 on |x| <= 1000") {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> logx(-3.0, 3.0);
  for (double x : {0.5, 3.9, 4.0, 4.1, 10.0, 37.5, 999.0}) {
    CHECK(std::abs(sine_integral(x) - si_oracle(x)) <= 1e-12);
  }
  for (int i = 0; i < 40; ++i) {
    const double x = std::pow(10.0, logx(rng));
    const double want = si_oracle(x);
    CHECK(std::abs(sine_integral(x) - want) <= 1e-12);
    CHECK(sine_integral(-x) == -sine_integral(x));
  }
}

TEST_CASE("Bessel J examples") {
  CHECK(bessel_j(0, 0.0) == std::complex<double>(1.0, 0.0));
  for (int n = 1; n < 6; ++n) CHECK(std::abs(bessel_j(n, 0.0)) == 0.0);

  // First zero of J_0 located by bisection on the series oracle.
  double lo = 2.0, hi = 3.0;
  for (int i = 0; i < 60; ++i) {
    const double mid = 0.5 * (lo + hi);
    (bessel_oracle(0, lo).real() * bessel_oracle(0, mid).real() <= 0.0 ? hi : lo) = mid;
  }
  CHECK(lo == doctest::Approx(2.4048255577).epsilon(1e-10));
  CHECK(std::abs(bessel_j(0, 2.4048255577)) < 1e-9);
  CHECK(std::abs(bessel_j(0, lo)) < 1e-14);

  const double x = 1e-4;
  const double cubic = std::abs(bessel_j(1, x).real() - x / 2.0);
  CHECK(cubic == doctest::Approx(x * x * x / 16.0).epsilon(1e-6));
}

TEST_CASE("Bessel J matches the 100-digit series within 1e-10 for |z| <= 100") {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> radius(0.0, 100.0);
  std::uniform_real_distribution<double> angle(-std::numbers::pi, std::numbers::pi);
  std::uniform_int_distribution<int> order(0, 60);
  double worst = 0.0;
  for (int i = 0; i < 300; ++i) {
    const std::complex<double> z = std::polar(radius(rng), angle(rng));
    const int n = order(rng);
    const std::complex<double> want = bessel_oracle(n, z);
    if (std::abs(want) < 1e-250) continue;
    worst = std::max(worst, rel_err(bessel_j(n, z), want));
  }
  CHECK(worst <= 1e-10);

  // Purely imaginary and real axes, and high orders.
  for (double r : {0.3, 5.0, 20.0, 60.0, 99.0}) {
    for (int n : {0, 1, 7, 30, 150, 500}) {
      for (std::complex<double> z : {std::complex<double>(r, 0.0), std::complex<double>(0.0, r),
                                     std::complex<double>(0.0, -r), std::complex<double>(-r, 0.0)}) {
        const std::complex<double> want = bessel_oracle(n, z);
        if (std::abs(want) < 1e-250) continue;
        CHECK(rel_err(bessel_j(n, z), want) <= 1e-10);
      }
    }
  }
}

TEST_CASE("Bessel recurrence residual and sum rule") {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> part(-30.0, 30.0);
  std::uniform_int_distribution<int> order(1, 50);
  for (int i = 0; i < 200; ++i) {
    const std::complex<double> z(part(rng), part(rng) * 0.2);
    const int n = order(rng);
    const auto jm = bessel_j(n - 1, z), j = bessel_j(n, z), jp = bessel_j(n + 1, z);
    const double residual = std::abs(jm + jp - (2.0 * n / z) * j);
    CHECK(residual <= 1e-9 * std::max(1.0, std::abs(j)));
  }
  double sum = std::norm(bessel_j(0, 5.0).real());
  for (int n = 1; n <= 60; ++n) sum += 2.0 * std::pow(bessel_j(n, 5.0).real(), 2);
  CHECK(std::abs(sum - 1.0) <= 1e-10);

  const auto seq = bessel_j_sequence(40, {7.5, -2.0});
  for (int n = 0; n <= 40; ++n) CHECK(rel_err(seq[n], bessel_oracle(n, {7.5, -2.0})) <= 1e-10);
  CHECK(std::abs(bessel_j(-3, 2.0) + bessel_j(3, 2.0)) < 1e-16);
}

TEST_CASE("spherical j1") {
  CHECK(spherical_j1(1e-6) / 1e-6 == doctest::Approx(1.0 / 3.0).epsilon(1e-9));
  CHECK(spherical_j1(std::numbers::pi) == doctest::Approx(1.0 / std::numbers::pi).epsilon(1e-14));
  for (double x : {1e-5, 0.3, 0.7, 2.0, 11.0}) {
    CHECK(spherical_j1(-x) == -spherical_j1(x));
    const double closed = std::sin(x) / (x * x) - std::cos(x) / x;
    if (x > 0.5) CHECK(spherical_j1(x) == doctest::Approx(closed).epsilon(1e-13));
  }
  // Series and closed-form branches meet smoothly.
  const Wide xw("0.49999999");
  const Wide want = sin(xw) / (xw * xw) - cos(xw) / xw;
  CHECK(spherical_j1(0.49999999) == doctest::Approx(static_cast<double>(want)).epsilon(1e-14));
}

TEST_CASE("damped semi-infinite quadrature") {
  const auto g = integrate_damped_semiinf([](double x) { return std::exp(-x * x); }, 1.0);
  CHECK(g.value == doctest::Approx(std::sqrt(std::numbers::pi) / 2).epsilon(1e-10));
  const auto m2 = integrate_damped_semiinf([](double x) { return x * x * std::exp(-x * x); }, 1.0);
  CHECK(m2.value == doctest::Approx(std::sqrt(std::numbers::pi) / 4).epsilon(1e-10));
  CHECK(m2.error >= 0.0);

  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(0.5, 5.0);
  for (int trial = 0; trial < 5; ++trial) {
    const double s = u(rng), w = u(rng) * 3.0, ph = u(rng);
    auto f = [=](double x) { return std::cos(w * x + ph) * std::exp(-(x / s) * (x / s)); };
    const auto got = integrate_damped_semiinf(f, s);
    // Brute-force trapezoid on 10^6 points over [0, 30 s].
    const int n = 1000000;
    const double h = 30.0 * s / n;
    double sum = 0.5 * (f(0.0) + f(30.0 * s));
    for (int i = 1; i < n; ++i) sum += f(i * h);
    const double brute = sum * h;
    CHECK(std::abs(got.value - brute) <= 1e-6 * std::abs(brute));

    auto g2 = [=](double x) { return 2.5 * f(x) - 0.75 * x * std::exp(-x * x / (s * s)); };
    const double lin = 2.5 * got.value -
                       0.75 * integrate_damped_semiinf([=](double x) { return x * std::exp(-x * x / (s * s)); }, s).value;
    CHECK(integrate_damped_semiinf(g2, s).value == doctest::Approx(lin).epsilon(1e-10));
  }
}

TEST_CASE("adaptive quadrature honours breakpoints and reports failure") {
  const auto r = integrate([](double x) { return std::abs(x - 0.3); }, 0.0, 1.0, {}, {0.3});
  CHECK(r.value == doctest::Approx(0.045 + 0.245).epsilon(1e-13));

  QuadratureSpec tight;
  tight.max_subdivisions = 3;
  tight.relative_tolerance = 1e-15;
  tight.absolute_tolerance = 1e-300;
  try {
    integrate([](double x) { return std::sin(400.0 * x) * std::exp(x); }, 0.0, 10.0, tight);
    FAIL("expected a quadrature error");
  } catch (const QuadratureError& e) {
    CHECK(std::isfinite(e.best_estimate()));
    CHECK(e.error_estimate() > 0.0);
  }
  QuadratureSpec bad;
  bad.relative_tolerance = 0.0;
  CHECK_THROWS_AS(bad.validate(), ConfigError);
}

TEST_CASE("Gauss-Legendre rules integrate polynomials exactly") {
  for (int n : {1, 4, 8, 16, 33}) {
    const GaussLegendre& gl = gauss_legendre(n);
    for (int p = 0; p <= 2 * n - 1; ++p) {
      double sum = 0.0;
      for (int i = 0; i < n; ++i) sum += gl.weights[i] * std::pow(gl.nodes[i], p);
      const double want = (p % 2 == 1) ? 0.0 : 2.0 / (p + 1);
      CHECK(std::abs(sum - want) <= 1e-14);
    }
  }
}

TEST_CASE("gamma function") {
  CHECK(gamma_function(1.0) == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(gamma_function(5.0) == doctest::Approx(24.0).epsilon(1e-14));
  CHECK(gamma_function(0.5) == doctest::Approx(std::sqrt(std::numbers::pi)).epsilon(1e-14));
  const double oracle = static_cast<double>(boost::math::tgamma(mp::cpp_bin_float_50("0.9")));
  CHECK(oracle == doctest::Approx(1.0686287021).epsilon(1e-10));
  CHECK(gamma_function(0.9) == doctest::Approx(oracle).epsilon(1e-12));
  CHECK_THROWS(gamma_function(0.0));
}

TEST_CASE("sinc") {
  CHECK(sinc(0.0) == 1.0);
  CHECK(sinc(1e-9) == doctest::Approx(1.0));
  CHECK(sinc(2.0) == doctest::Approx(std::sin(2.0) / 2.0).epsilon(1e-15));
}
