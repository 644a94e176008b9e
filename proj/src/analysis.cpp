#include "talbot/analysis.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <sstream>
#include <thread>

#include "talbot/errors.hpp"

namespace talbot {

namespace {

constexpr int min_aleph_samples = 2001;

Eigen::ArrayXd resample(const PatternResult& p, const Eigen::ArrayXd& x) {
  return x.unaryExpr([&p](double v) { return p.evaluate(v); });
}

}  // namespace

AlephResult aleph(const PatternResult& p_qm, const PatternResult& p_csl, double window, double threshold) {
  if (!(window > 0.0)) throw ConfigError("aleph window must be positive");
  if (p_qm.x.size() != p_csl.x.size() || (p_qm.x - p_csl.x).cwiseAbs().maxCoeff() > 1e-12 * window) {
    throw ConfigError("aleph needs both patterns on the same screen grid");
  }
  const Eigen::Index n = p_qm.x.size();
  const double lo = p_qm.x(0), hi = p_qm.x(n - 1);
  if (std::abs(lo + 0.5 * window) > 1e-9 * window || std::abs(hi - 0.5 * window) > 1e-9 * window) {
    throw ConfigError("aleph needs a screen grid spanning exactly [-L/2, L/2]");
  }
  Eigen::ArrayXd x, a, b;
  if (n >= min_aleph_samples) {
    x = p_qm.x.array();
    a = p_qm.P.array();
    b = p_csl.P.array();
  } else {
    x = Eigen::ArrayXd::LinSpaced(min_aleph_samples, lo, hi);
    a = resample(p_qm, x);
    b = resample(p_csl, x);
  }
  const Eigen::ArrayXd ratio = (a - b).abs() / (a + b).abs();
  const Eigen::Index m = x.size();
  double integral = 0.0;
  for (Eigen::Index i = 0; i + 1 < m; ++i) integral += 0.5 * (ratio(i) + ratio(i + 1)) * (x(i + 1) - x(i));
  AlephResult r;
  r.value = std::clamp(integral / window, 0.0, 1.0);
  r.threshold = threshold;
  r.excluded = r.value >= threshold;
  return r;
}

void ScanSpec::validate() const {
  if (!(rc_min > 0.0) || !(rc_max > rc_min)) throw ConfigError("scan r_c range must be positive and increasing");
  if (!(lambda_min > 0.0) || !(lambda_max >= lambda_min)) {
    throw ConfigError("scan lambda range must be positive and non-decreasing");
  }
  if (rc_points < 1 || lambda_points < 1) throw ConfigError("scan grid sizes must be positive");
  if (threads < 1) throw ConfigError("scan needs at least one thread");
  if (bisection_steps < 0) throw ConfigError("bisection steps must be non-negative");
}

Eigen::VectorXd log_grid(double lo, double hi, int points) {
  if (points == 1) return Eigen::VectorXd::Constant(1, lo);
  Eigen::VectorXd g = Eigen::VectorXd::LinSpaced(points, std::log10(lo), std::log10(hi));
  for (int i = 0; i < points; ++i) g(i) = std::pow(10.0, g(i));
  g(0) = lo;
  g(points - 1) = hi;
  return g;
}

AlephResult aleph_at(const PatternEngine& engine, const PatternResult& p_qm, double r_c, double lambda) {
  const ExperimentConfig& c = engine.config();
  const CslSaturation sat(r_c, c.particle.radius(), c.particle.material.density);
  const PatternResult p_csl = engine.pattern(PatternKind::quantum, &sat, lambda);
  return aleph(p_qm, p_csl, c.screen.window, c.aleph_threshold);
}

namespace {

struct Column {
  std::vector<double> aleph;
  std::vector<ScanFailure> failures;
  std::vector<std::string> violations;
  bool has_boundary = false;
  double boundary_lambda = 0.0;
};

Column scan_column(const PatternEngine& engine, const PatternResult& p_qm, double r_c, const Eigen::VectorXd& lambdas,
                   const ScanSpec& spec) {
  const ExperimentConfig& c = engine.config();
  const CslSaturation sat(r_c, c.particle.radius(), c.particle.material.density);
  auto evaluate = [&](double lambda) {
    const PatternResult p = engine.pattern(PatternKind::quantum, &sat, lambda);
    return aleph(p_qm, p, c.screen.window, c.aleph_threshold).value;
  };

  Column col;
  const int n = static_cast<int>(lambdas.size());
  col.aleph.assign(n, std::numeric_limits<double>::quiet_NaN());
  for (int j = 0; j < n; ++j) {
    try {
      col.aleph[j] = evaluate(lambdas(j));
    } catch (const Error& e) {
      col.failures.push_back({r_c, lambdas(j), e.what()});
    }
  }
  double last = -1.0;
  double last_lambda = 0.0;
  for (int j = 0; j < n; ++j) {
    if (std::isnan(col.aleph[j])) continue;
    if (col.aleph[j] < last - 1e-12) {
      std::ostringstream msg;
      msg.precision(17);
      msg << "r_c=" << r_c << ": aleph decreases from " << last << " at lambda=" << last_lambda << " to "
          << col.aleph[j] << " at lambda=" << lambdas(j);
      col.violations.push_back(msg.str());
    }
    last = col.aleph[j];
    last_lambda = lambdas(j);
  }

  // Bracket: lowest excluded grid λ and the grid λ just below it.
  int first = -1;
  for (int j = 0; j < n; ++j) {
    if (!std::isnan(col.aleph[j]) && col.aleph[j] >= c.aleph_threshold) {
      first = j;
      break;
    }
  }
  if (first <= 0 || std::isnan(col.aleph[first - 1])) return col;
  double lo = std::log(lambdas(first - 1));
  double hi = std::log(lambdas(first));
  try {
    for (int step = 0; step < spec.bisection_steps; ++step) {
      const double mid = 0.5 * (lo + hi);
      if (evaluate(std::exp(mid)) >= c.aleph_threshold) {
        hi = mid;
      } else {
        lo = mid;
      }
    }
    col.has_boundary = true;
    col.boundary_lambda = std::exp(0.5 * (lo + hi));
  } catch (const Error& e) {
    col.failures.push_back({r_c, std::exp(0.5 * (lo + hi)), std::string("boundary bisection: ") + e.what()});
  }
  return col;
}

}  // namespace

ExclusionGrid exclusion_scan(const ExperimentConfig& base, const ScanSpec& spec) {
  spec.validate();
  ExperimentConfig config = base;
  config.csl.reset();
  const PatternEngine engine(config);
  const PatternResult p_qm = engine.pattern_without_csl(PatternKind::quantum);

  ExclusionGrid grid;
  grid.threshold = config.aleph_threshold;
  grid.r_c = log_grid(spec.rc_min, spec.rc_max, spec.rc_points);
  grid.lambda = log_grid(spec.lambda_min, spec.lambda_max, spec.lambda_points);
  grid.aleph.resize(spec.rc_points, spec.lambda_points);

  std::vector<Column> columns(spec.rc_points);
  std::atomic<int> next{0};
  auto worker = [&]() {
    for (int i = next++; i < spec.rc_points; i = next++) {
      try {
        columns[i] = scan_column(engine, p_qm, grid.r_c(i), grid.lambda, spec);
      } catch (const Error& e) {
        Column failed;
        failed.aleph.assign(spec.lambda_points, std::numeric_limits<double>::quiet_NaN());
        for (int j = 0; j < spec.lambda_points; ++j) failed.failures.push_back({grid.r_c(i), grid.lambda(j), e.what()});
        columns[i] = std::move(failed);
      }
    }
  };
  const int threads = std::min(spec.threads, spec.rc_points);
  if (threads <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (int t = 0; t < threads; ++t) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }

  int failed_points = 0;
  for (int i = 0; i < spec.rc_points; ++i) {
    const Column& col = columns[i];
    for (int j = 0; j < spec.lambda_points; ++j) {
      grid.aleph(i, j) = col.aleph[j];
      if (std::isnan(col.aleph[j])) ++failed_points;
    }
    grid.failures.insert(grid.failures.end(), col.failures.begin(), col.failures.end());
    grid.monotonicity_violations.insert(grid.monotonicity_violations.end(), col.violations.begin(),
                                        col.violations.end());
    if (col.has_boundary) grid.boundary.emplace_back(grid.r_c(i), col.boundary_lambda);
  }
  const double total = static_cast<double>(spec.rc_points) * spec.lambda_points;
  grid.aborted = failed_points > spec.max_failure_fraction * total;
  return grid;
}

}  // namespace talbot
