#pragma once

#include <Eigen/Dense>
#include <string>
#include <utility>
#include <vector>

#include "talbot/pattern.hpp"

namespace talbot {

struct AlephResult {
  double value = 0.0;
  double threshold = 0.05;
  bool excluded = false;
};

/// ℵ = (1/L) ∫_{-L/2}^{L/2} |P_QM - P_CSL| / |P_QM + P_CSL| dx by the trapezoid
/// rule. Patterns sampled on fewer than 2001 points are resampled from their
/// Fourier components.
AlephResult aleph(const PatternResult& p_qm, const PatternResult& p_csl, double window, double threshold = 0.05);

struct ScanSpec {
  double rc_min = 1e-9;
  double rc_max = 1e-4;
  double lambda_min = 1e-20;
  double lambda_max = 1e-6;
  int rc_points = 60;
  int lambda_points = 60;
  int threads = 1;
  int bisection_steps = 20;
  /// Fraction of failed grid points above which the scan counts as aborted.
  double max_failure_fraction = 0.01;

  void validate() const;
};

struct ScanFailure {
  double r_c = 0.0;
  double lambda = 0.0;
  std::string reason;
};

struct ExclusionGrid {
  Eigen::VectorXd r_c;     // m
  Eigen::VectorXd lambda;  // 1/s
  Eigen::MatrixXd aleph;   // rows follow r_c, columns follow λ; NaN where the point failed
  double threshold = 0.05;
  std::vector<std::pair<double, double>> boundary;  // (r_c, λ) with ℵ = threshold
  std::vector<std::string> monotonicity_violations;
  std::vector<ScanFailure> failures;
  bool aborted = false;
};

Eigen::VectorXd log_grid(double lo, double hi, int points);

/// ℵ at one (r_c, λ) point against a precomputed CSL-free pattern.
AlephResult aleph_at(const PatternEngine& engine, const PatternResult& p_qm, double r_c, double lambda);

ExclusionGrid exclusion_scan(const ExperimentConfig& base, const ScanSpec& spec);

}  // namespace talbot
