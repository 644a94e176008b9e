#include <CLI11.hpp>
#include <json.hpp>

#include <cmath>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

#include "talbot/analysis.hpp"
#include "talbot/config.hpp"
#include "talbot/constants.hpp"
#include "talbot/errors.hpp"
#include "talbot/output.hpp"
#include "talbot/version.hpp"

using namespace talbot;
using nlohmann::ordered_json;

namespace {

enum Exit { ok = 0, config_error = 1, numeric_error = 2, partial_scan = 3 };

// JSON has no NaN; failed values become null.
ordered_json number(double v) { return std::isfinite(v) ? ordered_json(v) : ordered_json(nullptr); }

ordered_json manifest_json(const RunManifest& m) {
  return {{"config_sha256", m.digest}, {"tool_version", m.tool_version}, {"timestamp", m.timestamp},
          {"warnings", m.warnings}};
}

void emit(const ordered_json& summary, const std::string& path) {
  const std::string text = summary.dump(2) + "\n";
  if (path.empty()) {
    std::cout << text;
  } else {
    write_file(path, text);
  }
}

template <class Writer>
void write_csv(const std::string& path, Writer&& writer) {
  std::ostringstream out;
  writer(out);
  write_file(path, out.str());
}

std::pair<double, double> parse_pair(const std::string& text, const std::string& flag) {
  const auto comma = text.find(',');
  if (comma == std::string::npos) throw ConfigError(flag + " expects two comma-separated numbers");
  try {
    return {std::stod(text.substr(0, comma)), std::stod(text.substr(comma + 1))};
  } catch (const std::exception&) {
    throw ConfigError(flag + " expects two comma-separated numbers, got '" + text + "'");
  }
}

std::pair<int, int> parse_grid(const std::string& text) {
  const auto x = text.find('x');
  try {
    if (x == std::string::npos) throw std::invalid_argument(text);
    return {std::stoi(text.substr(0, x)), std::stoi(text.substr(x + 1))};
  } catch (const std::exception&) {
    throw ConfigError("--grid expects NxM, got '" + text + "'");
  }
}

// --csl overrides the config's [csl] table.
ExperimentConfig load(const std::string& path, const std::string& csl) {
  ExperimentConfig c = parse_config(path);
  if (!csl.empty()) {
    const auto [lambda, r_c] = parse_pair(csl, "--csl");
    c.csl = CslParams{lambda, r_c};
    c.validate();
  }
  return c;
}

ordered_json common_scalars(const PatternEngine& engine) {
  const ExperimentConfig& c = engine.config();
  const DerivedScales& s = engine.scales();
  return {{"talbot_time_s", s.talbot_time},
          {"magnified_period_m", s.magnified_period},
          {"sigma_x_m", s.sigma_x},
          {"delta_per_m", s.delta},
          {"eikonal_phase_rad", engine.grating().eikonal_phase()},
          {"gamma_coll_per_s", engine.collision_rate()},
          {"drop_length_m", drop_length(c.t1, c.t2)}};
}

double gamma_csl(const ExperimentConfig& c) {
  if (!c.csl) return 0.0;
  return csl_rate(*c.csl, c.particle.radius(), c.particle.material.density);
}

struct Common {
  std::string config;
  std::string csl;
  std::string out;
  std::string summary;
};

int cmd_pattern(const Common& o, bool no_csl) {
  ExperimentConfig c = load(o.config, o.csl);
  if (no_csl) c.csl.reset();
  const PatternEngine engine(c);
  const PatternResult q = engine.pattern_without_csl(PatternKind::quantum);
  const PatternResult cl = engine.pattern_without_csl(PatternKind::classical);
  std::optional<PatternResult> with_csl;
  if (c.csl && c.csl->rate > 0.0) with_csl = engine.pattern(PatternKind::quantum);

  std::vector<std::string> warnings = q.warnings;
  warnings.insert(warnings.end(), cl.warnings.begin(), cl.warnings.end());
  if (with_csl) warnings.insert(warnings.end(), with_csl->warnings.begin(), with_csl->warnings.end());
  const RunManifest m = make_manifest(config_digest(c), warnings);
  if (!o.out.empty()) {
    write_csv(o.out, [&](std::ostream& s) { write_pattern_csv(s, m, q, cl, with_csl ? &*with_csl : nullptr); });
  }

  ordered_json r = common_scalars(engine);
  r["visibility_quantum"] = visibility(q);
  r["visibility_classical"] = visibility(cl);
  r["aleph_quantum_classical"] = aleph(q, cl, c.screen.window, c.aleph_threshold).value;
  if (with_csl) {
    r["visibility_csl"] = visibility(*with_csl);
    r["aleph"] = aleph(q, *with_csl, c.screen.window, c.aleph_threshold).value;
    r["gamma_csl_per_s"] = gamma_csl(c);
  }
  emit({{"manifest", manifest_json(m)}, {"results", r}}, o.summary);
  return ok;
}

int cmd_aleph(const Common& o) {
  const ExperimentConfig c = load(o.config, o.csl);
  if (!c.csl) throw ConfigError("aleph needs a [csl] table or --csl lambda,r_c");
  const PatternEngine engine(c);
  const PatternResult q = engine.pattern_without_csl(PatternKind::quantum);
  const PatternResult p = engine.pattern(PatternKind::quantum);
  const AlephResult a = aleph(q, p, c.screen.window, c.aleph_threshold);
  const RunManifest m = make_manifest(config_digest(c), p.warnings);
  ordered_json r = common_scalars(engine);
  r["lambda_per_s"] = c.csl->rate;
  r["r_c_m"] = c.csl->localization_length;
  r["gamma_csl_per_s"] = gamma_csl(c);
  r["visibility_quantum"] = visibility(q);
  r["visibility_csl"] = visibility(p);
  r["aleph"] = a.value;
  r["threshold"] = a.threshold;
  r["excluded"] = a.excluded;
  emit({{"manifest", manifest_json(m)}, {"results", r}}, o.summary.empty() ? o.out : o.summary);
  return ok;
}

int cmd_scan(const Common& o, const std::string& grid_text, const std::string& rc_range,
             const std::string& lambda_range, int threads, std::string boundary) {
  const ExperimentConfig c = load(o.config, "");
  ScanSpec spec;
  std::tie(spec.rc_points, spec.lambda_points) = parse_grid(grid_text);
  if (!rc_range.empty()) std::tie(spec.rc_min, spec.rc_max) = parse_pair(rc_range, "--rc-range");
  if (!lambda_range.empty()) std::tie(spec.lambda_min, spec.lambda_max) = parse_pair(lambda_range, "--lambda-range");
  spec.threads = threads;
  const ExclusionGrid grid = exclusion_scan(c, spec);

  std::vector<std::string> warnings = grid.monotonicity_violations;
  for (const ScanFailure& f : grid.failures) {
    std::ostringstream msg;
    msg.precision(17);
    msg << "failed at r_c=" << f.r_c << " lambda=" << f.lambda << ": " << f.reason;
    warnings.push_back(msg.str());
  }
  const RunManifest m = make_manifest(config_digest(c), warnings);
  if (!o.out.empty()) {
    write_csv(o.out, [&](std::ostream& s) { write_grid_csv(s, m, grid); });
    if (boundary.empty()) {
      const std::filesystem::path p(o.out);
      boundary = (p.parent_path() / (p.stem().string() + "_boundary.csv")).string();
    }
  }
  if (!boundary.empty()) write_csv(boundary, [&](std::ostream& s) { write_boundary_csv(s, m, grid); });

  ordered_json points = ordered_json::array();
  for (const auto& [rc, lambda] : grid.boundary) points.push_back({number(rc), number(lambda)});
  const ordered_json r = {{"grid", {spec.rc_points, spec.lambda_points}},
                          {"threshold", grid.threshold},
                          {"failed_points", grid.failures.size()},
                          {"monotonicity_violations", grid.monotonicity_violations.size()},
                          {"aborted", grid.aborted},
                          {"boundary", points}};
  emit({{"manifest", manifest_json(m)}, {"results", r}}, o.summary);
  for (const std::string& w : warnings) std::cerr << "warning: " << w << "\n";
  return grid.failures.empty() ? ok : partial_scan;
}

int cmd_temperature(const Common& o) {
  const ExperimentConfig c = load(o.config, "");
  const InternalTempTrajectory traj =
      internal_temperature_trajectory(c.particle, c.trap, c.env, c.t1, c.t2);
  const RunManifest m = make_manifest(config_digest(c));
  if (!o.out.empty()) write_csv(o.out, [&](std::ostream& s) { write_temperature_csv(s, m, traj); });
  const double t_c = traj.trap_end;
  const ordered_json r = {{"trap_end_s", t_c},
                          {"T_int_at_release_K", traj.at(t_c)},
                          {"T_int_at_grating_K", traj.at(t_c + c.t1)},
                          {"T_int_at_screen_K", traj.at(t_c + c.t1 + c.t2)}};
  emit({{"manifest", manifest_json(m)}, {"results", r}}, o.summary);
  return ok;
}

int cmd_coherence(const Common& o, int slits) {
  const ExperimentConfig c = load(o.config, "");
  const DerivedScales s = derived_scales(c);
  const double m = c.particle.mass, d = c.grating.period();
  const double tau = t1_for_slits(slits, m, s.sigma_x, d);
  const ordered_json r = {{"sigma_x_m", s.sigma_x},
                          {"slits", slits},
                          {"t1_for_slits_s", tau},
                          {"spread_at_t1_m", coherence_spread(s.sigma_x, m, c.t1)},
                          {"talbot_time_s", s.talbot_time},
                          {"drop_length_m", drop_length(c.t1, c.t2)}};
  emit({{"manifest", manifest_json(make_manifest(config_digest(c)))}, {"results", r}}, o.summary);
  return ok;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Near-field Talbot-Lau interference of dielectric nanospheres with collapse-model tests"};
  app.set_version_flag("--version", std::string(talbot::version));
  app.require_subcommand(1);

  auto add_common = [](CLI::App* sub, Common& o, const char* out_help) {
    sub->add_option("-c,--config", o.config, "TOML experiment description")->required()->check(CLI::ExistingFile);
    sub->add_option("-o,--out", o.out, out_help);
    sub->add_option("--summary", o.summary, "write the JSON summary here instead of standard output");
  };

  Common pat, ale, sca, tem, coh;
  bool no_csl = false;
  auto* p = app.add_subcommand("pattern", "quantum, classical and CSL screen patterns");
  add_common(p, pat, "pattern CSV (x_m,P_quantum,P_classical[,P_csl])");
  p->add_option("--csl", pat.csl, "collapse parameters lambda,r_c (1/s, m)");
  p->add_flag("--no-csl", no_csl, "ignore the config's [csl] table");

  auto* a = app.add_subcommand("aleph", "figure of merit for one collapse point");
  add_common(a, ale, "JSON result file");
  a->add_option("--csl", ale.csl, "collapse parameters lambda,r_c (1/s, m)");

  std::string grid = "60x60", rc_range, lambda_range, boundary;
  int threads = 1;
  auto* s = app.add_subcommand("scan", "exclusion map over (r_c, lambda)");
  add_common(s, sca, "grid CSV (r_c_m,lambda_per_s,aleph)");
  s->add_option("--grid", grid, "r_c points x lambda points")->capture_default_str();
  s->add_option("--rc-range", rc_range, "r_c range min,max in m (default 1e-9,1e-4)");
  s->add_option("--lambda-range", lambda_range, "lambda range min,max in 1/s (default 1e-20,1e-6)");
  s->add_option("--threads", threads, "worker threads; output does not depend on it")->check(CLI::PositiveNumber);
  s->add_option("--boundary", boundary, "boundary CSV (default: <out>_boundary.csv)");

  auto* t = app.add_subcommand("temperature", "internal temperature history");
  add_common(t, tem, "CSV (t_s,T_int_K)");

  int slits = 4;
  auto* k = app.add_subcommand("coherence", "coherence spreading and slit-covering time");
  add_common(k, coh, "unused");
  k->add_option("--slits", slits, "number of grating periods to cover")->check(CLI::PositiveNumber);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? ok : config_error;
  }

  try {
    if (*p) return cmd_pattern(pat, no_csl);
    if (*a) return cmd_aleph(ale);
    if (*s) return cmd_scan(sca, grid, rc_range, lambda_range, threads, boundary);
    if (*t) return cmd_temperature(tem);
    if (*k) return cmd_coherence(coh, slits);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return config_error;
  } catch (const RangeError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return config_error;
  } catch (const NumericIntegrityError& e) {
    std::cerr << "numeric integrity error: " << e.what() << "\n";
    return numeric_error;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return numeric_error;
  }
  return ok;
}
