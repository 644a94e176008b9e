#pragma once

#include <Eigen/Dense>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include "talbot/csl.hpp"
#include "talbot/environment.hpp"
#include "talbot/grating.hpp"
#include "talbot/optics.hpp"

namespace talbot {

struct ScreenParams {
  double window = 1e-7;  // L, m
  int samples = 2001;

  void validate() const;
};

struct ExperimentConfig {
  Particle particle;
  TrapParams trap;
  GratingParams grating;
  double t1 = 0.0;  // s
  double t2 = 0.0;  // s
  EnvironmentParams env;
  DecoherenceChannels channels;
  /// Include the absorption and Rayleigh-scattering parts (a, b, F, c_abs) of the grating.
  bool grating_incoherent = true;
  ScatteringTimeConvention scattering_convention = ScatteringTimeConvention::as_printed;
  std::optional<CslParams> csl;
  /// Post-cooling widths; when absent the thermal trap state is used.
  std::optional<double> sigma_x;
  std::optional<double> sigma_p;
  ScreenParams screen;
  double aleph_threshold = 0.05;

  void validate() const;
};

struct DerivedScales {
  double sigma_x = 0.0;           // m
  double sigma_p = 0.0;           // kg m/s
  double talbot_time = 0.0;       // s
  double magnified_period = 0.0;  // D, m
  double delta = 0.0;             // 1/m
};

double thermal_sigma_x(double mass, double mech_frequency, double com_temperature);
double thermal_sigma_p(double mass, double mech_frequency, double com_temperature);
DerivedScales derived_scales(const ExperimentConfig& config);

struct KernelRow {
  int n = 0;
  double xi = 0.0;
  double talbot = 0.0;  // B_n, or the classical coefficient
  double r_env = 1.0;
  double r_csl = 1.0;
  double envelope = 1.0;
  double coefficient = 0.0;  // product of the above
};

enum class PatternKind { quantum, classical };

struct PatternResult {
  PatternKind kind = PatternKind::quantum;
  bool with_csl = false;
  Eigen::VectorXd x;  // m
  Eigen::VectorXd P;  // 1/m
  std::vector<KernelRow> components;
  double delta = 0.0;
  double period = 0.0;  // D
  std::vector<std::string> warnings;
  std::string digest;

  /// P at an arbitrary screen position from the Fourier components.
  double evaluate(double x) const;
};

/// Per-configuration state shared by the quantum, classical and CSL patterns:
/// the grating interaction, the free-fall kernels and the derived scales.
class PatternEngine {
 public:
  explicit PatternEngine(const ExperimentConfig& config);

  const ExperimentConfig& config() const noexcept { return config_; }
  const DerivedScales& scales() const noexcept { return scales_; }
  const GratingInteraction& grating() const noexcept { return *grating_; }
  double collision_rate() const noexcept;
  const InternalTempTrajectory* trajectory() const noexcept { return trajectory_ ? &*trajectory_ : nullptr; }

  double xi(int n) const;
  double talbot(int n, PatternKind kind) const;
  double ln_r_env(int n) const;
  double envelope(int n) const;

  /// Uses config().csl when `csl` is null.
  PatternResult pattern(PatternKind kind, const CslSaturation* csl = nullptr, double csl_rate = 0.0) const;
  PatternResult pattern_without_csl(PatternKind kind) const;

 private:
  struct BaseRow {
    double quantum, classical, ln_r_env, envelope, xi;
  };
  const BaseRow& row(int n) const;

  ExperimentConfig config_;
  DerivedScales scales_;
  std::unique_ptr<GratingInteraction> grating_;
  std::optional<SpectralGrid> spectral_;
  std::optional<InternalTempTrajectory> trajectory_;
  std::unique_ptr<EnvironmentKernel> environment_;
  std::unique_ptr<CslSaturation> config_csl_;
  mutable std::mutex mutex_;
  mutable std::vector<std::unique_ptr<BaseRow>> rows_;
};

inline constexpr int pattern_order_cap = 200;

PatternResult pattern_quantum(const ExperimentConfig& config);
PatternResult pattern_classical(const ExperimentConfig& config);

/// (max - min)/(max + min) over the central period [-D/2, D/2].
double visibility(const PatternResult& p);

/// Fourier component amplitude 2 δ c_n of P at order n (0 beyond the series).
double fourier_component(const PatternResult& p, int n);

double coherence_spread(double sigma_x, double mass, double tau);
double t1_for_slits(int n_slits, double mass, double sigma_x, double period);
double drop_length(double t1, double t2);

}  // namespace talbot
