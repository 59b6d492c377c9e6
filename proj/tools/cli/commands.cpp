#include "commands.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <limits>
#include <ostream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "config.hpp"
#include "dephasim/analytics.hpp"
#include "dephasim/dynamics.hpp"
#include "dephasim/errors.hpp"
#include "dephasim/harness.hpp"
#include "dephasim/units.hpp"
#include "oracles.hpp"

namespace dephasim::cli {

namespace {

using nlohmann::json;

CliConfig load_config(const Options& opts) {
  CliConfig cfg = CliConfig::load(opts.config);
  if (opts.seed) cfg.set("run", "seed", std::to_string(*opts.seed));
  if (opts.runs) cfg.set("run", "runs", std::to_string(*opts.runs));
  return cfg;
}

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.10g", v);
  return buf;
}

// Writes to --out when given, otherwise to the fallback stream.
void emit(const Options& opts, std::ostream& fallback, const std::string& text) {
  if (!opts.out) {
    fallback << text;
    return;
  }
  std::ofstream f(*opts.out);
  if (!f) throw ConfigError("cannot write " + opts.out->string());
  f << text;
}

void emit_plot(const Options& opts, const std::string& data_file, const std::string& body) {
  if (!opts.plot) return;
  if (!opts.out) throw ConfigError("--plot requires --out");
  std::filesystem::path script = *opts.out;
  script += ".gp";
  std::ofstream f(script);
  if (!f) throw ConfigError("cannot write " + script.string());
  f << "set datafile separator ','\nset key autotitle columnhead\n";
  f << "data = '" << data_file << "'\n" << body;
}

double fit_bound(const CliConfig& cfg, const char* key, double fallback) {
  return cfg.has("run", key) ? units::from_us(cfg.number("run", key)) : fallback;
}

}  // namespace

unsigned resolve_threads(const Options& opts) {
  if (opts.threads) return *opts.threads;
  if (const char* env = std::getenv("DEPHASIM_THREADS")) {
    char* end = nullptr;
    const unsigned long v = std::strtoul(env, &end, 10);
    if (end == env || *end != '\0') throw ConfigError(std::string("DEPHASIM_THREADS: not an integer: ") + env);
    return static_cast<unsigned>(v);
  }
  return 0;
}

void cmd_simulate(const Options& opts, std::ostream& out, std::ostream& log) {
  const CliConfig cfg = load_config(opts);
  const RunConfig run = cfg.run_config();
  run.validate();
  const unsigned threads = resolve_threads(opts);

  const auto start = std::chrono::steady_clock::now();
  const DephasingCurve curve = run_experiment(run, threads);
  const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

  const std::filesystem::path record = opts.out.value_or("dephasim_run.json");
  persist_run(run, curve, record, {wall, threads});
  Options plot_opts = opts;
  plot_opts.out = record;
  emit_plot(plot_opts, curve_csv_path(record).filename().string(),
            "set logscale xy\nset xlabel 't (us)'\nset ylabel '-2 ln D'\n"
            "plot data using 1:(-2*log($4)) with linespoints title '-2 ln D'\n");

  const LawParams law = LawParams::from(run.ensemble);
  const double x = run.qubit.modulation_ratio();
  std::string crossover = "n/a";
  std::string classification = "n/a";
  double t_tilde = std::numeric_limits<double>::quiet_NaN();
  if (law.mu_av > law.gamma && std::isfinite(law.t1_thermal)) {
    t_tilde = law.crossover_time();
    crossover = fmt(units::to_us(t_tilde));
  }
  if (law.mu_max < law.gamma || std::isfinite(law.t1_thermal)) {
    try {
      classification = to_string(crossover_diagnostics(law, x).classification);
    } catch (const PreconditionError&) {
    }
  }
  std::string exponent = "n/a";
  const double lo = fit_bound(cfg, "fit_t_lo_us", std::isfinite(t_tilde) ? 0.01 * t_tilde : 0.0);
  const double hi = fit_bound(cfg, "fit_t_hi_us", std::isfinite(t_tilde) ? 0.3 * t_tilde : 0.0);
  if (hi > lo) {
    try {
      const PowerLawFit fit = fit_powerlaw(curve, lo, hi);
      exponent = fmt(fit.exponent) + "+-" + fmt(fit.stderr_exponent);
    } catch (const FitError&) {
    }
  }
  out << "t_crossover_us=" << crossover << " classification=" << classification
      << " short_time_exponent=" << exponent << " runs=" << run.n_runs << " wall_s=" << fmt(wall)
      << " record=" << record.string() << "\n";
  (void)log;
}

void cmd_analytic(const Options& opts, std::ostream& out, std::ostream& log) {
  const CliConfig cfg = load_config(opts);
  const LawParams law = cfg.law();
  const double x = cfg.qubit().modulation_ratio();
  const std::vector<double> grid = cfg.grid().make();
  const bool small = law.mu_max < law.gamma && law.delta_typ < law.gamma;
  std::string csv = "t_us,neg2lnD,branch_id\n";
  for (const double t : grid) {
    LawValue v;
    if (small) {
      v = {small_diffusion_law(law, x, t), 0};
    } else {
      v = dephasing_law(law, x, t);
    }
    csv += fmt(units::to_us(t)) + "," + fmt(v.neg2lnD) + "," + std::to_string(v.branch) + "\n";
  }
  emit(opts, out, csv);
  emit_plot(opts, opts.out ? opts.out->filename().string() : "",
            "set logscale xy\nset xlabel 't (us)'\nset ylabel '-2 ln D'\nplot data using 1:2 with lines\n");
  if (opts.out) log << "analytic: " << grid.size() << " points, branch 0 marks the small-diffusion law\n";
}

void cmd_regime(const Options& opts, std::ostream& out, std::ostream& log) {
  const CliConfig cfg = load_config(opts);
  const LawParams law = cfg.law();
  const double x = cfg.qubit().modulation_ratio();
  const RegimeReport r = crossover_diagnostics(law, x);
  const json report = {
      {"classification", to_string(r.classification)},
      {"t_crossover_us", units::to_us(r.t_crossover)},
      {"neg2lnD_at_crossover", r.neg2lnD_at_crossover},
      {"markov_number", r.markov_number},
      {"markov_ok", r.markov_ok},
      {"gamma_1q_per_s", r.gamma_1q},
      {"gamma_phi_per_s", r.gamma_phi},
      {"modulation_ratio", x},
      {"s4", bessel_s4(x)},
  };
  emit(opts, out, report.dump(2) + "\n");
  (void)log;
}

void cmd_sweep(const Options& opts, std::ostream& out, std::ostream& log) {
  const CliConfig cfg = load_config(opts);
  const SweepSpec spec = cfg.sweep();
  const auto rows = temperature_sweep(spec);
  std::string csv = "T_K,gamma_phi,gamma_phi_long,mu_av_MHz,t1_thermal_us\n";
  std::size_t peak = 0;
  std::size_t nearest = 0;
  for (std::size_t k = 0; k < rows.size(); ++k) {
    const auto& r = rows[k];
    csv += fmt(r.temperature) + "," + fmt(r.gamma_phi) + "," + fmt(r.gamma_phi_long) + "," +
           fmt(units::to_mhz(r.mu_av)) + "," + fmt(units::to_us(r.t1_thermal)) + "\n";
    if (r.gamma_phi > rows[peak].gamma_phi) peak = k;
    if (std::abs(std::log(r.mu_av / spec.base.gamma)) < std::abs(std::log(rows[nearest].mu_av / spec.base.gamma))) {
      nearest = k;
    }
  }
  emit(opts, out, csv);
  emit_plot(opts, opts.out ? opts.out->filename().string() : "",
            "set logscale xy\nset xlabel 'T (K)'\nset ylabel 'gamma_phi (1/s)'\nplot data using 1:2 with linespoints\n");
  log << "sweep: peak at T_K=" << fmt(rows[peak].temperature) << ", mu_av = gamma nearest T_K="
      << fmt(rows[nearest].temperature) << "\n";
}

void cmd_oracle_diffusion(const Options& opts, std::ostream& out, std::ostream& log) {
  const CliConfig cfg = load_config(opts);
  const LawParams law = cfg.law();
  ThermalBathParams bath;
  bath.kappa = std::isfinite(law.t1_thermal) ? 1.0 / law.t1_thermal : 0.0;
  bath.mu_av = law.mu_av;
  bath.mu_max = law.mu_max;
  bath.n_fluctuators = static_cast<int>(cfg.number_or("bath", "n_fluctuators", 64));
  const auto samples = static_cast<std::size_t>(cfg.number_or("run", "runs", 1e5));
  const auto seed = static_cast<std::uint64_t>(cfg.number_or("run", "seed", 1));
  const DiffusionOracleReport r = diffusion_oracle(bath, samples, seed);
  auto ks = [](const KsResult& k) { return json{{"distance", k.distance}, {"p_value", k.p_value}}; };
  const json report = {
      {"samples", r.samples},
      {"t_short_us", units::to_us(r.t_short)},
      {"t_long_us", units::to_us(r.t_long)},
      {"telegraph_vs_propagator", ks(r.telegraph_short)},
      {"ka_vs_propagator", ks(r.ka_short)},
      {"telegraph_vs_ka", ks(r.engines_short)},
      {"telegraph_vs_stationary", ks(r.telegraph_stationary)},
  };
  emit(opts, out, report.dump(2) + "\n");
  (void)log;
}

void cmd_validate(const Options& opts, std::ostream& out, std::ostream& log) {
  const CliConfig cfg = load_config(opts);
  const QubitParams qubit = cfg.qubit();
  const LawParams law = cfg.law();
  std::vector<TlsParams> ensemble;
  if (const auto tls = cfg.single_tls()) {
    ensemble.push_back(*tls);
  } else {
    RunConfig run = cfg.run_config();
    ensemble = fixed_ensemble(run);
  }
  if (ensemble.size() > kFullSolverMaxTls) {
    throw PreconditionError("validate: the ensemble has " + std::to_string(ensemble.size()) +
                            " TLSs, the full solver takes at most 64");
  }
  EnsembleSpec timing;
  timing.gamma = law.gamma;
  timing.r_thermal = std::isfinite(law.t1_thermal) ? 1.0 / law.t1_thermal : 0.0;
  timing.band_halfwidth = law.mu_max;
  SolverConfig solver;
  solver.m_max = static_cast<int>(cfg.number_or("solver", "m_max", 64));
  solver.bessel_tol = cfg.number_or("solver", "bessel_tol", 1e-12);
  solver.dt = cfg.has("solver", "dt_us") ? units::from_us(cfg.number("solver", "dt_us"))
                                         : default_time_step(timing, qubit, solver.m_max);
  DiffusionEngine engine;
  engine.kind = engine_from_string(cfg.text_or("bath", "engine", "telegraph").c_str());
  engine.kappa = timing.r_thermal;
  engine.n_fluctuators = static_cast<int>(cfg.number_or("bath", "n_fluctuators", 64));
  engine.ka_dt = solver.dt;
  const std::vector<double> grid = cfg.grid().make();
  const auto runs = static_cast<std::size_t>(cfg.number_or("run", "runs", 1));
  const auto seed = static_cast<std::uint64_t>(cfg.number_or("run", "seed", 1));
  const SolverComparison c = compare_solvers(ensemble, qubit, engine, grid, runs, seed, solver);
  constexpr double kTolerance = 0.01;
  const json report = {
      {"tls", ensemble.size()},
      {"runs", c.runs},
      {"max_rel_dev", c.max_rel_dev},
      {"t_at_max_us", units::to_us(c.t_at_max)},
      {"max_norm", c.max_norm},
      {"tolerance", kTolerance},
      {"within_tolerance", c.max_rel_dev <= kTolerance},
  };
  emit(opts, out, report.dump(2) + "\n");
  (void)log;
}

int run_command(const std::string& name, const Options& opts, std::ostream& out, std::ostream& log) {
  using Command = void (*)(const Options&, std::ostream&, std::ostream&);
  static const std::pair<const char*, Command> kCommands[] = {
      {"simulate", cmd_simulate},         {"analytic", cmd_analytic},
      {"regime", cmd_regime},             {"sweep", cmd_sweep},
      {"oracle-diffusion", cmd_oracle_diffusion}, {"validate", cmd_validate},
  };
  Command command = nullptr;
  for (const auto& [n, c] : kCommands) {
    if (name == n) command = c;
  }
  if (command == nullptr) {
    log << "error: unknown subcommand '" << name << "'\n";
    return kExitConfig;
  }
  try {
    command(opts, out, log);
    return kExitOk;
  } catch (const ConfigError& e) {
    log << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const PreconditionError& e) {
    log << "precondition error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const SchemaError& e) {
    log << "schema error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const std::exception& e) {
    log << "numeric error: " << e.what() << "\n";
    return kExitNumeric;
  }
}

}  // namespace dephasim::cli
