#include "config.hpp"

#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include "dephasim/errors.hpp"
#include "dephasim/units.hpp"

namespace dephasim::cli {

namespace {

enum class Kind { number, count, text, flag };

struct KeySpec {
  const char* section;
  const char* key;
  Kind kind;
};

constexpr KeySpec kSchema[] = {
    {"qubit", "e0_MHz", Kind::number},
    {"qubit", "a_mod_MHz", Kind::number},
    {"qubit", "omega_mod_MHz", Kind::number},
    {"ensemble", "delta_typ_MHz", Kind::number},
    {"ensemble", "g_max_MHz", Kind::number},
    {"ensemble", "t1_qubit_us", Kind::number},
    {"ensemble", "g_min_ratio", Kind::number},
    {"ensemble", "band_halfwidth_MHz", Kind::number},
    {"ensemble", "gamma_MHz", Kind::number},
    {"ensemble", "mu_av_MHz", Kind::number},
    {"ensemble", "mu_max_MHz", Kind::number},
    {"ensemble", "t1_thermal_us", Kind::number},
    {"ensemble", "tls_detuning_MHz", Kind::number},
    {"ensemble", "tls_g_MHz", Kind::number},
    {"bath", "engine", Kind::text},
    {"bath", "n_fluctuators", Kind::count},
    {"solver", "dt_us", Kind::number},
    {"solver", "m_max", Kind::count},
    {"solver", "bessel_tol", Kind::number},
    {"solver", "mode", Kind::text},
    {"run", "runs", Kind::count},
    {"run", "seed", Kind::count},
    {"run", "t_stop_us", Kind::number},
    {"run", "n_points", Kind::count},
    {"run", "spacing", Kind::text},
    {"run", "t_log_start_us", Kind::number},
    {"run", "resample_ensemble", Kind::flag},
    {"run", "fit_t_lo_us", Kind::number},
    {"run", "fit_t_hi_us", Kind::number},
    {"sweep", "t_min_K", Kind::number},
    {"sweep", "t_max_K", Kind::number},
    {"sweep", "n_points", Kind::count},
    {"sweep", "c_mu_MHz_per_K", Kind::number},
    {"sweep", "c_r_per_s_K3", Kind::number},
    {"sweep", "mu_max_ratio", Kind::number},
    {"sweep", "threshold", Kind::number},
};

std::string where(const std::string& section, const std::string& key) { return "[" + section + "] " + key; }

const KeySpec* find_key(const std::string& section, const std::string& key) {
  for (const auto& k : kSchema) {
    if (section == k.section && key == k.key) return &k;
  }
  return nullptr;
}

double parse_number(const std::string& section, const std::string& key, const std::string& value) {
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(value, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used == 0 || used != value.size() || std::isnan(v)) {
    throw ConfigError(where(section, key) + ": expected a number, got '" + value + "'");
  }
  return v;
}

std::uint64_t parse_count(const std::string& section, const std::string& key, const std::string& value) {
  std::size_t used = 0;
  unsigned long long v = 0;
  try {
    if (!value.empty() && value[0] != '-') v = std::stoull(value, &used, 10);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used == 0 || used != value.size()) {
    throw ConfigError(where(section, key) + ": expected a non-negative integer, got '" + value + "'");
  }
  return v;
}

bool parse_flag(const std::string& section, const std::string& key, const std::string& value) {
  if (value == "true" || value == "1" || value == "yes" || value == "on") return true;
  if (value == "false" || value == "0" || value == "no" || value == "off") return false;
  throw ConfigError(where(section, key) + ": expected true or false, got '" + value + "'");
}

void check_value(const KeySpec& spec, const std::string& value) {
  switch (spec.kind) {
    case Kind::number:
      parse_number(spec.section, spec.key, value);
      break;
    case Kind::count:
      parse_count(spec.section, spec.key, value);
      break;
    case Kind::flag:
      parse_flag(spec.section, spec.key, value);
      break;
    case Kind::text:
      if (value.empty()) throw ConfigError(where(spec.section, spec.key) + ": empty value");
      break;
  }
}

double mhz(double v) { return units::from_mhz(v); }
double us(double v) { return units::from_us(v); }

}  // namespace

CliConfig CliConfig::parse(const std::string& text) {
  namespace pt = boost::property_tree;
  pt::ptree tree;
  std::istringstream in(text);
  try {
    pt::read_ini(in, tree);
  } catch (const pt::ini_parser_error& e) {
    throw ConfigError(std::string("config: ") + e.what());
  }
  CliConfig cfg;
  for (const auto& [section, body] : tree) {
    if (body.empty()) throw ConfigError("config: key '" + section + "' outside any section");
    for (const auto& [key, node] : body) {
      if (!node.empty()) throw ConfigError(where(section, key) + ": nested keys are not supported");
      cfg.set(section, key, node.data());
    }
  }
  return cfg;
}

CliConfig CliConfig::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return parse(ss.str());
}

std::string CliConfig::serialize() const {
  std::string out;
  for (const auto& [section, keys] : sections_) {
    if (!out.empty()) out += "\n";
    out += "[" + section + "]\n";
    for (const auto& [key, value] : keys) out += key + " = " + value + "\n";
  }
  return out;
}

bool CliConfig::has(const std::string& section, const std::string& key) const {
  const auto s = sections_.find(section);
  return s != sections_.end() && s->second.count(key) != 0;
}

bool CliConfig::has_section(const std::string& section) const { return sections_.count(section) != 0; }

void CliConfig::set(const std::string& section, const std::string& key, const std::string& value) {
  const KeySpec* spec = find_key(section, key);
  if (spec == nullptr) throw ConfigError("unknown key " + where(section, key));
  check_value(*spec, value);
  sections_[section][key] = value;
}

double CliConfig::number(const std::string& section, const std::string& key) const {
  if (!has(section, key)) throw ConfigError("missing " + where(section, key));
  return parse_number(section, key, sections_.at(section).at(key));
}

double CliConfig::number_or(const std::string& section, const std::string& key, double fallback) const {
  return has(section, key) ? number(section, key) : fallback;
}

std::string CliConfig::text_or(const std::string& section, const std::string& key,
                               const std::string& fallback) const {
  return has(section, key) ? sections_.at(section).at(key) : fallback;
}

namespace {

std::uint64_t count_or(const CliConfig& cfg, const std::string& section, const std::string& key,
                       std::uint64_t fallback) {
  return cfg.has(section, key) ? parse_count(section, key, cfg.text_or(section, key, "")) : fallback;
}

// g_max from g_max_MHz, or from t1_qubit_us through Gamma_1q = g_max^2 / delta.
double g_max_of(const CliConfig& cfg) {
  const bool direct = cfg.has("ensemble", "g_max_MHz");
  const bool via_t1 = cfg.has("ensemble", "t1_qubit_us");
  if (direct && via_t1) throw ConfigError("[ensemble] give only one of g_max_MHz and t1_qubit_us");
  if (direct) return mhz(cfg.number("ensemble", "g_max_MHz"));
  if (!via_t1) throw ConfigError("missing [ensemble] g_max_MHz (or t1_qubit_us)");
  const double t1q = us(cfg.number("ensemble", "t1_qubit_us"));
  if (!(t1q > 0.0)) throw ConfigError("[ensemble] t1_qubit_us must be positive");
  return std::sqrt(mhz(cfg.number("ensemble", "delta_typ_MHz")) / t1q);
}

double r_thermal_of(const CliConfig& cfg) {
  const double t1 = us(cfg.number("ensemble", "t1_thermal_us"));
  if (!(t1 > 0.0)) throw ConfigError("[ensemble] t1_thermal_us must be positive (inf freezes diffusion)");
  return std::isinf(t1) ? 0.0 : 1.0 / t1;
}

}  // namespace

QubitParams CliConfig::qubit() const {
  QubitParams q;
  q.e0 = mhz(number("qubit", "e0_MHz"));
  q.a_mod = mhz(number_or("qubit", "a_mod_MHz", 0.0));
  q.omega_mod = mhz(number_or("qubit", "omega_mod_MHz", 0.0));
  if (q.a_mod > 0.0 && !has("qubit", "omega_mod_MHz")) throw ConfigError("missing [qubit] omega_mod_MHz");
  q.validate();
  return q;
}

EnsembleSpec CliConfig::ensemble() const {
  EnsembleSpec e;
  e.delta_typ = mhz(number("ensemble", "delta_typ_MHz"));
  e.g_max = g_max_of(*this);
  e.g_min = number_or("ensemble", "g_min_ratio", 1e-3) * e.g_max;
  e.gamma = mhz(number("ensemble", "gamma_MHz"));
  e.mu_av = mhz(number("ensemble", "mu_av_MHz"));
  e.mu_max = mhz(number("ensemble", "mu_max_MHz"));
  e.band_halfwidth = mhz(number_or("ensemble", "band_halfwidth_MHz", number("ensemble", "mu_max_MHz")));
  e.r_thermal = r_thermal_of(*this);
  e.validate();
  return e;
}

SolverConfig CliConfig::solver(const EnsembleSpec& spec, const QubitParams& q) const {
  SolverConfig s;
  s.m_max = static_cast<int>(count_or(*this, "solver", "m_max", 64));
  s.bessel_tol = number_or("solver", "bessel_tol", 1e-12);
  s.mode = solver_mode_from_string(text_or("solver", "mode", "markov").c_str());
  s.dt = has("solver", "dt_us") ? us(number("solver", "dt_us")) : default_time_step(spec, q, s.m_max);
  s.validate();
  return s;
}

GridSpec CliConfig::grid() const {
  GridSpec g;
  g.stop = us(number("run", "t_stop_us"));
  g.points = count_or(*this, "run", "n_points", 101);
  g.spacing = spacing_from_string(text_or("run", "spacing", "linear").c_str());
  if (g.spacing == GridSpacing::log) g.log_start = us(number("run", "t_log_start_us"));
  g.validate();
  return g;
}

RunConfig CliConfig::run_config() const {
  RunConfig cfg;
  cfg.qubit = qubit();
  cfg.ensemble = ensemble();
  cfg.solver = solver(cfg.ensemble, cfg.qubit);
  cfg.grid = grid();
  if (!has("run", "runs")) throw ConfigError("missing [run] runs");
  cfg.n_runs = count_or(*this, "run", "runs", 0);
  cfg.seed = count_or(*this, "run", "seed", 1);
  cfg.engine = engine_from_string(text_or("bath", "engine", "telegraph").c_str());
  cfg.n_fluctuators = static_cast<int>(count_or(*this, "bath", "n_fluctuators", 64));
  cfg.resample_ensemble_per_run = parse_flag("run", "resample_ensemble", text_or("run", "resample_ensemble", "false"));
  return cfg;
}

LawParams CliConfig::law() const {
  LawParams p;
  p.g_max = g_max_of(*this);
  p.delta_typ = mhz(number("ensemble", "delta_typ_MHz"));
  p.gamma = mhz(number("ensemble", "gamma_MHz"));
  p.mu_av = mhz(number("ensemble", "mu_av_MHz"));
  p.mu_max = mhz(number("ensemble", "mu_max_MHz"));
  const double r = r_thermal_of(*this);
  p.t1_thermal = r > 0.0 ? 1.0 / r : std::numeric_limits<double>::infinity();
  if (!(p.delta_typ > 0.0 && p.gamma > 0.0 && p.g_max > 0.0)) {
    throw ConfigError("[ensemble] delta_typ_MHz, gamma_MHz and the coupling must be positive");
  }
  return p;
}

SweepSpec CliConfig::sweep() const {
  SweepSpec s;
  s.base.g_max = g_max_of(*this);
  s.base.delta_typ = mhz(number("ensemble", "delta_typ_MHz"));
  s.base.gamma = mhz(number("ensemble", "gamma_MHz"));
  s.x = qubit().modulation_ratio();
  s.t_min = number("sweep", "t_min_K");
  s.t_max = number("sweep", "t_max_K");
  s.points = static_cast<int>(count_or(*this, "sweep", "n_points", 41));
  s.cal.c_mu = mhz(number("sweep", "c_mu_MHz_per_K"));
  s.cal.c_r = number("sweep", "c_r_per_s_K3");
  s.mu_max_ratio = number_or("sweep", "mu_max_ratio", 1.0);
  s.threshold = number_or("sweep", "threshold", kQuasiStaticThreshold);
  return s;
}

std::optional<TlsParams> CliConfig::single_tls() const {
  const bool det = has("ensemble", "tls_detuning_MHz");
  const bool g = has("ensemble", "tls_g_MHz");
  if (!det && !g) return std::nullopt;
  if (det != g) throw ConfigError("[ensemble] tls_detuning_MHz and tls_g_MHz must be given together");
  TlsParams t;
  t.eps0 = mhz(number("qubit", "e0_MHz")) - mhz(number("ensemble", "tls_detuning_MHz"));
  t.g = mhz(number("ensemble", "tls_g_MHz"));
  t.gamma = mhz(number("ensemble", "gamma_MHz"));
  t.mu_av = mhz(number("ensemble", "mu_av_MHz"));
  t.mu_max = mhz(number("ensemble", "mu_max_MHz"));
  if (!(t.g > 0.0 && t.gamma > 0.0)) throw ConfigError("[ensemble] tls_g_MHz and gamma_MHz must be positive");
  if (t.mu_av < 0.0 || t.mu_max < t.mu_av) throw ConfigError("[ensemble] need 0 <= mu_av_MHz <= mu_max_MHz");
  return t;
}

}  // namespace dephasim::cli
