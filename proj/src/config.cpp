#include "talbot/config.hpp"

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include <toml.hpp>

#include "talbot/constants.hpp"
#include "talbot/errors.hpp"
#include "talbot/output.hpp"

namespace talbot {

namespace {

class Section {
 public:
  Section(const toml::table* table, std::string name) : table_(table), name_(std::move(name)) {}

  bool present() const { return table_ != nullptr; }

  std::optional<double> number(const std::string& key) {
    const toml::node* node = find(key);
    if (!node) return std::nullopt;
    if (!node->is_number()) throw ConfigError(path(key) + " must be a number");
    const double v = *node->value<double>();
    if (!std::isfinite(v)) throw ConfigError(path(key) + " must be finite");
    return v;
  }

  double number(const std::string& key, double fallback) { return number(key).value_or(fallback); }

  double required_number(const std::string& key) {
    auto v = number(key);
    if (!v) throw ConfigError("missing required key " + path(key));
    return *v;
  }

  std::optional<std::string> text(const std::string& key) {
    const toml::node* node = find(key);
    if (!node) return std::nullopt;
    if (!node->is_string()) throw ConfigError(path(key) + " must be a string");
    return *node->value<std::string>();
  }

  bool flag(const std::string& key, bool fallback) {
    const toml::node* node = find(key);
    if (!node) return fallback;
    if (!node->is_boolean()) throw ConfigError(path(key) + " must be true or false");
    return *node->value<bool>();
  }

  int integer(const std::string& key, int fallback) {
    const toml::node* node = find(key);
    if (!node) return fallback;
    if (!node->is_integer()) throw ConfigError(path(key) + " must be an integer");
    return static_cast<int>(*node->value<int64_t>());
  }

  void reject_unknown() const {
    if (!table_) return;
    for (auto&& [key, node] : *table_) {
      (void)node;
      const std::string k(key.str());
      if (!used_.count(k)) throw ConfigError("unknown key " + path(k));
    }
  }

  std::string path(const std::string& key) const { return name_ + "." + key; }

 private:
  const toml::node* find(const std::string& key) {
    used_.insert(key);
    if (!table_) return nullptr;
    return table_->get(key);
  }

  const toml::table* table_;
  std::string name_;
  std::set<std::string> used_;
};

const std::set<std::string> known_sections = {"particle", "trap",     "state",  "grating", "times",
                                              "environment", "channels", "csl", "screen",  "analysis"};

void positive(double v, const std::string& key) {
  if (!(v > 0.0)) throw ConfigError(key + " must be positive");
}

void non_negative(double v, const std::string& key) {
  if (!(v >= 0.0)) throw ConfigError(key + " must be non-negative");
}

}  // namespace

ExperimentConfig parse_config_text(const std::string& text, const std::filesystem::path& base_dir) {
  toml::table root;
  try {
    root = toml::parse(text);
  } catch (const toml::parse_error& e) {
    std::ostringstream msg;
    msg << "config parse error at line " << e.source().begin.line << ": " << e.description();
    throw ConfigError(msg.str());
  }
  for (auto&& [key, node] : root) {
    const std::string k(key.str());
    if (!known_sections.count(k)) throw ConfigError("unknown key " + k);
    if (!node.is_table()) throw ConfigError(k + " must be a table");
  }
  auto section = [&root](const char* name) { return Section(root[name].as_table(), name); };

  ExperimentConfig c;

  Section particle = section("particle");
  if (!particle.present()) throw ConfigError("missing required table particle");
  const auto material = particle.text("material");
  if (!material) throw ConfigError("missing required key particle.material");
  std::shared_ptr<const OpticalTable> table;
  if (auto file = particle.text("optical_table")) {
    std::filesystem::path p(*file);
    if (p.is_relative() && !base_dir.empty()) p = base_dir / p;
    table = std::make_shared<const OpticalTable>(load_optical_table(p));
  }
  c.particle.material = material_by_name(*material, table);
  c.particle.mass = particle.required_number("mass");
  positive(c.particle.mass, particle.path("mass"));
  if (auto regime = particle.text("regime")) c.particle.regime = parse_regime(*regime);
  c.particle.material.density = particle.number("density", c.particle.material.density);
  c.particle.material.specific_heat = particle.number("specific_heat", c.particle.material.specific_heat);
  c.particle.material.ionization_energy =
      particle.number("ionization_energy", c.particle.material.ionization_energy);
  positive(c.particle.material.density, particle.path("density"));
  positive(c.particle.material.specific_heat, particle.path("specific_heat"));
  positive(c.particle.material.ionization_energy, particle.path("ionization_energy"));
  particle.reject_unknown();

  Section trap = section("trap");
  c.trap.wavelength = trap.number("wavelength", c.trap.wavelength);
  c.trap.cooling_time = trap.number("cooling_time", c.trap.cooling_time);
  c.trap.intensity = trap.number("intensity", c.trap.intensity);
  c.trap.mech_frequency = trap.number("mech_frequency", c.trap.mech_frequency);
  c.trap.com_temperature = trap.number("com_temperature", c.trap.com_temperature);
  positive(c.trap.wavelength, trap.path("wavelength"));
  positive(c.trap.cooling_time, trap.path("cooling_time"));
  non_negative(c.trap.intensity, trap.path("intensity"));
  positive(c.trap.mech_frequency, trap.path("mech_frequency"));
  positive(c.trap.com_temperature, trap.path("com_temperature"));
  trap.reject_unknown();

  Section state = section("state");
  c.sigma_x = state.number("sigma_x");
  c.sigma_p = state.number("sigma_p");
  if (c.sigma_x) positive(*c.sigma_x, state.path("sigma_x"));
  if (c.sigma_p) positive(*c.sigma_p, state.path("sigma_p"));
  state.reject_unknown();

  Section grating = section("grating");
  c.grating.wavelength = grating.number("wavelength", 355e-9);
  c.grating.energy_per_area = grating.number("energy_per_area", 0.003);
  positive(c.grating.wavelength, grating.path("wavelength"));
  non_negative(c.grating.energy_per_area, grating.path("energy_per_area"));
  grating.reject_unknown();

  Section times = section("times");
  c.t1 = times.number("t1", 0.362);
  c.t2 = times.number("t2", 0.181);
  positive(c.t1, times.path("t1"));
  positive(c.t2, times.path("t2"));
  times.reject_unknown();

  Section env = section("environment");
  c.env.temperature = env.number("temperature", c.env.temperature);
  c.env.pressure = env.number("pressure", c.env.pressure);
  c.env.gas.polarizability_volume = env.number("gas_polarizability_volume", c.env.gas.polarizability_volume);
  c.env.gas.ionization_energy = env.number("gas_ionization_energy", c.env.gas.ionization_energy);
  c.env.gas.mass = env.number("gas_mass", c.env.gas.mass);
  if (auto v = env.number("gas_velocity")) {
    positive(*v, env.path("gas_velocity"));
    c.env.gas_velocity = *v;
  }
  if (auto conv = env.text("scattering_time_convention")) {
    c.scattering_convention = parse_scattering_convention(*conv);
  }
  positive(c.env.temperature, env.path("temperature"));
  non_negative(c.env.pressure, env.path("pressure"));
  positive(c.env.gas.polarizability_volume, env.path("gas_polarizability_volume"));
  positive(c.env.gas.ionization_energy, env.path("gas_ionization_energy"));
  positive(c.env.gas.mass, env.path("gas_mass"));
  env.reject_unknown();

  Section channels = section("channels");
  c.channels.collisions = channels.flag("collisions", true);
  c.channels.absorption = channels.flag("absorption", true);
  c.channels.scattering = channels.flag("scattering", true);
  c.channels.emission = channels.flag("emission", true);
  c.grating_incoherent = channels.flag("grating_incoherent", true);
  channels.reject_unknown();

  Section csl = section("csl");
  if (csl.present()) {
    CslParams p;
    p.rate = csl.required_number("lambda");
    p.localization_length = csl.required_number("r_c");
    non_negative(p.rate, csl.path("lambda"));
    positive(p.localization_length, csl.path("r_c"));
    c.csl = p;
  }
  csl.reject_unknown();

  Section screen = section("screen");
  c.screen.window = screen.number("window", c.screen.window);
  c.screen.samples = screen.integer("samples", c.screen.samples);
  positive(c.screen.window, screen.path("window"));
  if (c.screen.samples < 201 || c.screen.samples % 2 == 0) {
    throw ConfigError(screen.path("samples") + " must be odd and at least 201");
  }
  screen.reject_unknown();

  Section analysis = section("analysis");
  c.aleph_threshold = analysis.number("threshold", c.aleph_threshold);
  if (!(c.aleph_threshold > 0.0 && c.aleph_threshold < 1.0)) {
    throw ConfigError(analysis.path("threshold") + " must lie in (0, 1)");
  }
  analysis.reject_unknown();

  c.validate();
  return c;
}

ExperimentConfig parse_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file " + path.string());
  std::stringstream buffer;
  buffer << in.rdbuf();
  return parse_config_text(buffer.str(), path.parent_path());
}

namespace {

std::string quoted(const std::string& s) {
  std::string out = "\"";
  for (char ch : s) {
    if (ch == '"' || ch == '\\') out.push_back('\\');
    out.push_back(ch);
  }
  return out + "\"";
}

std::string toml_number(double v) {
  std::string s = format_number(v);
  if (s.find_first_of(".eEn") == std::string::npos) s += ".0";
  return s;
}

std::string default_table_source(const std::string& material) {
  const char* file = material == "Si" ? "si.csv" : "sio2.csv";
  return (default_data_directory() / "optics" / file).string();
}

}  // namespace

std::string serialize_config(const ExperimentConfig& c) {
  std::ostringstream out;
  auto line = [&out](const char* key, double v) { out << key << " = " << toml_number(v) << "\n"; };
  auto flag = [&out](const char* key, bool v) { out << key << " = " << (v ? "true" : "false") << "\n"; };

  const Material& mat = c.particle.material;
  out << "[particle]\n";
  out << "material = " << quoted(mat.name) << "\n";
  line("mass", c.particle.mass);
  out << "regime = " << quoted(to_string(c.particle.regime)) << "\n";
  line("density", mat.density);
  line("specific_heat", mat.specific_heat);
  line("ionization_energy", mat.ionization_energy);
  if (mat.optical_table && mat.optical_table->source() != default_table_source(mat.name)) {
    out << "optical_table = " << quoted(std::filesystem::absolute(mat.optical_table->source()).string()) << "\n";
  }

  out << "\n[trap]\n";
  line("wavelength", c.trap.wavelength);
  line("cooling_time", c.trap.cooling_time);
  line("intensity", c.trap.intensity);
  line("mech_frequency", c.trap.mech_frequency);
  line("com_temperature", c.trap.com_temperature);

  if (c.sigma_x || c.sigma_p) {
    out << "\n[state]\n";
    if (c.sigma_x) line("sigma_x", *c.sigma_x);
    if (c.sigma_p) line("sigma_p", *c.sigma_p);
  }

  out << "\n[grating]\n";
  line("wavelength", c.grating.wavelength);
  line("energy_per_area", c.grating.energy_per_area);

  out << "\n[times]\n";
  line("t1", c.t1);
  line("t2", c.t2);

  out << "\n[environment]\n";
  line("temperature", c.env.temperature);
  line("pressure", c.env.pressure);
  line("gas_polarizability_volume", c.env.gas.polarizability_volume);
  line("gas_ionization_energy", c.env.gas.ionization_energy);
  line("gas_mass", c.env.gas.mass);
  if (c.env.gas_velocity > 0.0) line("gas_velocity", c.env.gas_velocity);
  out << "scattering_time_convention = " << quoted(to_string(c.scattering_convention)) << "\n";

  out << "\n[channels]\n";
  flag("collisions", c.channels.collisions);
  flag("absorption", c.channels.absorption);
  flag("scattering", c.channels.scattering);
  flag("emission", c.channels.emission);
  flag("grating_incoherent", c.grating_incoherent);

  if (c.csl) {
    out << "\n[csl]\n";
    line("lambda", c.csl->rate);
    line("r_c", c.csl->localization_length);
  }

  out << "\n[screen]\n";
  line("window", c.screen.window);
  out << "samples = " << c.screen.samples << "\n";

  out << "\n[analysis]\n";
  line("threshold", c.aleph_threshold);
  return out.str();
}

std::string config_digest(const ExperimentConfig& config) { return sha256_hex(serialize_config(config)); }

}  // namespace talbot
