#include "talbot/numerics.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <map>
#include <mutex>
#include <numbers>
#include <queue>

#include "talbot/errors.hpp"

namespace talbot {

void QuadratureSpec::validate() const {
  if (!(relative_tolerance > 0.0) || !(absolute_tolerance > 0.0)) {
    throw ConfigError("quadrature tolerances must be positive");
  }
  if (max_subdivisions < 1) throw ConfigError("quadrature max_subdivisions must be at least 1");
}

namespace {

// Kronrod 15-point abscissae (positive half) and weights, with the embedded
// 7-point Gauss weights on the odd-indexed nodes.
constexpr std::array<double, 8> kXgk = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
constexpr std::array<double, 8> kWgk = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
constexpr std::array<double, 4> kWg = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

struct Panel {
  double a, b, value, error;
  bool operator<(const Panel& other) const { return error < other.error; }
};

Panel gauss_kronrod(const Integrand& f, double a, double b) {
  const double center = 0.5 * (a + b);
  const double half = 0.5 * (b - a);
  const double fc = f(center);
  double kronrod = fc * kWgk[7];
  double gauss = fc * kWg[3];
  for (int j = 0; j < 7; ++j) {
    const double dx = half * kXgk[j];
    const double f1 = f(center - dx);
    const double f2 = f(center + dx);
    kronrod += kWgk[j] * (f1 + f2);
    if (j % 2 == 1) gauss += kWg[j / 2] * (f1 + f2);
  }
  const double value = kronrod * half;
  const double error = std::abs((kronrod - gauss) * half);
  if (!std::isfinite(value)) {
    throw QuadratureError("integrand is not finite on [" + std::to_string(a) + ", " + std::to_string(b) + "]",
                          value, error);
  }
  return {a, b, value, error};
}

}  // namespace

QuadratureResult integrate(const Integrand& f, double a, double b, const QuadratureSpec& spec,
                           const std::vector<double>& breakpoints, int initial_panels) {
  spec.validate();
  if (a == b) return {};
  if (b < a) {
    QuadratureResult r = integrate(f, b, a, spec, breakpoints, initial_panels);
    r.value = -r.value;
    return r;
  }
  std::vector<double> cuts{a};
  std::vector<double> inner;
  for (double p : breakpoints) {
    if (p > a && p < b) inner.push_back(p);
  }
  std::sort(inner.begin(), inner.end());
  inner.erase(std::unique(inner.begin(), inner.end()), inner.end());
  cuts.insert(cuts.end(), inner.begin(), inner.end());
  cuts.push_back(b);

  const int per_segment = std::max(1, initial_panels);
  std::priority_queue<Panel> queue;
  double total = 0.0;
  double total_error = 0.0;
  for (std::size_t s = 0; s + 1 < cuts.size(); ++s) {
    const double width = (cuts[s + 1] - cuts[s]) / per_segment;
    for (int p = 0; p < per_segment; ++p) {
      const double lo = cuts[s] + p * width;
      const double hi = p + 1 == per_segment ? cuts[s + 1] : lo + width;
      Panel panel = gauss_kronrod(f, lo, hi);
      total += panel.value;
      total_error += panel.error;
      queue.push(panel);
    }
  }

  int subdivisions = 0;
  while (total_error > std::max(spec.absolute_tolerance, spec.relative_tolerance * std::abs(total))) {
    if (subdivisions >= spec.max_subdivisions) {
      throw QuadratureError("quadrature did not converge within " + std::to_string(spec.max_subdivisions) +
                                " subdivisions",
                            total, total_error);
    }
    const Panel worst = queue.top();
    queue.pop();
    const double mid = 0.5 * (worst.a + worst.b);
    if (!(mid > worst.a && mid < worst.b)) {
      throw QuadratureError("quadrature panel collapsed to machine resolution", total, total_error);
    }
    const Panel left = gauss_kronrod(f, worst.a, mid);
    const Panel right = gauss_kronrod(f, mid, worst.b);
    total += left.value + right.value - worst.value;
    total_error += left.error + right.error - worst.error;
    queue.push(left);
    queue.push(right);
    ++subdivisions;
  }

  // Re-sum so the result does not depend on the order of the running updates.
  double value = 0.0;
  double error = 0.0;
  std::vector<Panel> panels;
  panels.reserve(queue.size());
  while (!queue.empty()) {
    panels.push_back(queue.top());
    queue.pop();
  }
  std::sort(panels.begin(), panels.end(), [](const Panel& l, const Panel& r) { return l.a < r.a; });
  for (const Panel& p : panels) {
    value += p.value;
    error += p.error;
  }
  return {value, error, subdivisions};
}

QuadratureResult integrate_damped_semiinf(const Integrand& f, double sigma, const QuadratureSpec& spec) {
  if (!(sigma > 0.0) || !std::isfinite(sigma)) throw ConfigError("damping scale must be positive and finite");
  return integrate(f, 0.0, 30.0 * sigma, spec, {}, 30);
}

const GaussLegendre& gauss_legendre(int n) {
  static std::mutex mutex;
  static std::map<int, GaussLegendre> cache;
  std::lock_guard<std::mutex> lock(mutex);
  auto it = cache.find(n);
  if (it != cache.end()) return it->second;
  if (n < 1) throw ConfigError("Gauss-Legendre order must be positive");
  GaussLegendre rule;
  rule.nodes.resize(n);
  rule.weights.resize(n);
  for (int i = 0; i < (n + 1) / 2; ++i) {
    double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int iter = 0; iter < 100; ++iter) {
      double p0 = 1.0, p1 = 0.0;
      for (int j = 1; j <= n; ++j) {
        const double p2 = p1;
        p1 = p0;
        p0 = ((2.0 * j - 1.0) * x * p1 - (j - 1.0) * p2) / j;
      }
      dp = n * (x * p0 - p1) / (x * x - 1.0);
      const double dx = p0 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    const double w = 2.0 / ((1.0 - x * x) * dp * dp);
    rule.nodes[i] = -x;
    rule.nodes[n - 1 - i] = x;
    rule.weights[i] = w;
    rule.weights[n - 1 - i] = w;
  }
  return cache.emplace(n, std::move(rule)).first->second;
}

double sine_integral(double x) {
  const double t = std::abs(x);
  if (t == 0.0) return 0.0;
  double result;
  if (t <= 4.0) {
    // Si(t) = Σ (-1)^k t^{2k+1} / ((2k+1)(2k+1)!)
    double term = t;
    result = t;
    const double t2 = t * t;
    for (int k = 1; k < 60; ++k) {
      term *= -t2 / ((2.0 * k) * (2.0 * k + 1.0));
      const double add = term / (2.0 * k + 1.0);
      result += add;
      if (std::abs(add) < 1e-17 * std::abs(result)) break;
    }
  } else {
    // Continued fraction for E1(it), evaluated with the modified Lentz method.
    constexpr double tiny = 1e-300;
    std::complex<double> b(1.0, t);
    std::complex<double> c = 1.0 / tiny;
    std::complex<double> d = 1.0 / b;
    std::complex<double> h = d;
    for (int i = 2; i < 100000; ++i) {
      const double a = -static_cast<double>(i - 1) * (i - 1);
      b += 2.0;
      d = 1.0 / (a * d + b);
      c = b + a / c;
      const std::complex<double> del = c * d;
      h *= del;
      if (std::abs(del.real() - 1.0) + std::abs(del.imag()) < 1e-16) break;
    }
    h *= std::complex<double>(std::cos(t), -std::sin(t));
    result = 0.5 * std::numbers::pi + h.imag();
  }
  return x < 0.0 ? -result : result;
}

double sinc(double x) {
  if (std::abs(x) < 1e-4) {
    const double x2 = x * x;
    return 1.0 - x2 / 6.0 * (1.0 - x2 / 20.0);
  }
  return std::sin(x) / x;
}

namespace {

using cplx = std::complex<double>;

std::vector<cplx> bessel_series(int nmax, cplx z) {
  std::vector<cplx> out(nmax + 1);
  const cplx half = 0.5 * z;
  const cplx q = -half * half;
  cplx lead = 1.0;  // (z/2)^n / n!
  for (int n = 0; n <= nmax; ++n) {
    if (n > 0) lead *= half / static_cast<double>(n);
    cplx term = 1.0;
    cplx sum = 1.0;
    for (int k = 1; k < 200; ++k) {
      term *= q / (static_cast<double>(k) * (n + k));
      sum += term;
      if (std::abs(term) < 1e-17 * std::abs(sum)) break;
    }
    out[n] = lead * sum;
  }
  return out;
}

std::vector<cplx> bessel_miller(int nmax, cplx z) {
  const double az = std::abs(z);
  const double top = std::max(static_cast<double>(nmax), az);
  int start = static_cast<int>(std::ceil(top + 30.0 + std::sqrt(40.0 * top)));
  if (start % 2) ++start;
  constexpr double big = 1e250;
  constexpr double rescale = 1e-250;

  std::vector<cplx> values(nmax + 1, 0.0);
  cplx next = 0.0;
  cplx current = 1e-280;
  // Normalisation sum S = J_0 + 2 Σ w^k J_k with w = -i (Im z >= 0) or +i.
  const cplx w = z.imag() >= 0.0 ? cplx(0.0, -1.0) : cplx(0.0, 1.0);
  // start is even, so w^start = (-1)^(start/2).
  cplx wpow = (start / 2) % 2 ? -1.0 : 1.0;
  cplx norm = 2.0 * wpow * current;
  const cplx two_over_z = 2.0 / z;
  for (int k = start; k >= 1; --k) {
    const cplx prev = static_cast<double>(k) * two_over_z * current - next;
    next = current;
    current = prev;
    if (k - 1 <= nmax) values[k - 1] = current;
    wpow /= w;
    norm += (k - 1 == 0 ? 1.0 : 2.0) * wpow * current;
    if (std::abs(current) > big) {
      current *= rescale;
      next *= rescale;
      norm *= rescale;
      for (int j = k - 1; j <= nmax; ++j) values[j] *= rescale;
    }
  }
  // S equals e^{-iz} for w = -i and e^{iz} for w = i.
  const cplx target = z.imag() >= 0.0 ? std::exp(cplx(0.0, -1.0) * z) : std::exp(cplx(0.0, 1.0) * z);
  const cplx scale = target / norm;
  for (auto& v : values) v *= scale;
  return values;
}

}  // namespace

std::vector<cplx> bessel_j_sequence(int nmax, cplx z) {
  if (nmax < 0) throw ConfigError("bessel_j_sequence needs nmax >= 0");
  if (!std::isfinite(z.real()) || !std::isfinite(z.imag())) {
    throw NumericIntegrityError("Bessel argument is not finite");
  }
  if (z == cplx(0.0, 0.0)) {
    std::vector<cplx> out(nmax + 1, 0.0);
    out[0] = 1.0;
    return out;
  }
  if (std::abs(z) <= 1.0) return bessel_series(nmax, z);
  return bessel_miller(nmax, z);
}

cplx bessel_j(int order, cplx z) {
  const int n = std::abs(order);
  const cplx value = bessel_j_sequence(n, z)[n];
  return (order < 0 && n % 2 == 1) ? -value : value;
}

double spherical_j1(double x) {
  const double ax = std::abs(x);
  if (ax < 0.5) {
    // j1(x) = x/3 - x^3/30 + ...
    const double x2 = x * x;
    double term = x / 3.0;
    double sum = term;
    for (int k = 0; k < 30; ++k) {
      term *= -x2 / (2.0 * (k + 1) * (2.0 * k + 5.0));
      sum += term;
      if (std::abs(term) < 1e-18 * std::abs(sum)) break;
    }
    return sum;
  }
  return std::sin(x) / (x * x) - std::cos(x) / x;
}

double gamma_function(double x) {
  if (!(x > 0.0)) throw ConfigError("gamma_function needs x > 0");
  return std::tgamma(x);
}

}  // namespace talbot
