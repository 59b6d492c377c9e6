#include "dephasim/harness.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstring>
#include <exception>
#include <limits>
#include <mutex>
#include <string>
#include <thread>

#include "dephasim/errors.hpp"
#include "dephasim/stats.hpp"

namespace dephasim {

namespace {

std::atomic<std::uint64_t> g_jensen_checks{0};
std::atomic<std::uint64_t> g_jensen_violations{0};

constexpr double kMaxFlipsPerStep = 1.0e3;

struct RunFailure {
  std::size_t run = std::numeric_limits<std::size_t>::max();
  std::exception_ptr error;
};

[[noreturn]] void rethrow_with_run(const RunFailure& failure) {
  const std::string prefix = "run " + std::to_string(failure.run) + ": ";
  try {
    std::rethrow_exception(failure.error);
  } catch (const PreconditionError& e) {
    throw PreconditionError(prefix + e.what());
  } catch (const ConfigError& e) {
    throw ConfigError(prefix + e.what());
  } catch (const std::exception& e) {
    throw NumericError(prefix + e.what());
  }
}

// Log-amplitudes of one run, one entry per grid point.
void simulate_run(const RunConfig& cfg, std::size_t run, const std::vector<TlsParams>* fixed,
                  std::span<const double> grid, const DiffusionEngine& engine, MarkovIntegrator& integrator,
                  ShiftPath& scratch, std::span<cplx> exponent) {
  const RunStreams streams{cfg.seed, run};
  std::vector<TlsParams> resampled;
  if (fixed == nullptr) {
    RandomStream rng = streams.ensemble();
    resampled = build_ensemble(cfg.ensemble, cfg.qubit, rng);
    check_markov_preconditions(resampled, cfg.qubit);
  }
  const std::vector<TlsParams>& ensemble = fixed != nullptr ? *fixed : resampled;
  std::fill(exponent.begin(), exponent.end(), cplx(0.0));

  if (cfg.solver.mode == SolverMode::markov) {
    if (fixed == nullptr) integrator.set_ensemble(ensemble);
    accumulate_realization(integrator, ensemble, engine, streams, grid, exponent, scratch);
    return;
  }
  if (ensemble.size() > kFullSolverMaxTls) throw PreconditionError("full solver: ensemble exceeds 64 TLSs");
  std::vector<ShiftPath> paths(ensemble.size());
  for (std::size_t n = 0; n < ensemble.size(); ++n) {
    RandomStream rng = streams.tls(n);
    engine.realize(ensemble[n], grid.back(), rng, paths[n]);
  }
  const AmplitudeRecord rec = evolve_full(ensemble, cfg.qubit, paths, grid);
  for (std::size_t k = 0; k < grid.size(); ++k) {
    if (rec.a[k] == cplx(0.0)) throw NumericError("full solver: amplitude underflow");
    exponent[k] = std::log(rec.a[k]);
  }
}

}  // namespace

const char* to_string(GridSpacing spacing) { return spacing == GridSpacing::linear ? "linear" : "log"; }

GridSpacing spacing_from_string(const char* name) {
  if (std::strcmp(name, "linear") == 0) return GridSpacing::linear;
  if (std::strcmp(name, "log") == 0) return GridSpacing::log;
  throw ConfigError(std::string("unknown grid spacing '") + name + "'");
}

void GridSpec::validate() const {
  if (points < 2) throw ConfigError("grid: at least two points required");
  if (!(stop > 0.0) || !std::isfinite(stop)) throw ConfigError("grid: stop must be positive and finite");
  if (spacing == GridSpacing::log) {
    if (!(log_start > 0.0 && log_start < stop)) throw ConfigError("grid: log spacing needs 0 < log_start < stop");
    if (points < 3) throw ConfigError("grid: log spacing needs at least three points");
  }
  const auto t = make();
  for (std::size_t k = 1; k < t.size(); ++k) {
    if (!(t[k] > t[k - 1])) throw ConfigError("grid: points are not strictly increasing");
  }
}

std::vector<double> GridSpec::make() const {
  std::vector<double> t(points, 0.0);
  if (points < 2) return t;
  if (spacing == GridSpacing::linear) {
    for (std::size_t k = 1; k < points; ++k) t[k] = stop * static_cast<double>(k) / static_cast<double>(points - 1);
  } else {
    const double ratio = std::log(stop / log_start);
    const std::size_t n = points - 1;
    for (std::size_t k = 0; k < n; ++k) {
      const double frac = n > 1 ? static_cast<double>(k) / static_cast<double>(n - 1) : 1.0;
      t[k + 1] = log_start * std::exp(ratio * frac);
    }
    t.back() = stop;
  }
  return t;
}

void RunConfig::validate() const {
  if (n_runs < 2) throw ConfigError("run: n_runs must be at least 2");
  grid.validate();
  ensemble.validate();
  qubit.validate();
  solver.validate();
  if (n_fluctuators < 8) throw ConfigError("bath: n_fluctuators must be at least 8");
  if (ensemble.mu_max <= 0.0) throw ConfigError("ensemble: mu_max must be positive");
}

DiffusionEngine RunConfig::diffusion_engine() const {
  return {engine, ensemble.r_thermal, n_fluctuators, solver.dt};
}

std::vector<TlsParams> fixed_ensemble(const RunConfig& cfg) {
  RandomStream rng = RunStreams{cfg.seed, kFixedEnsembleRun}.ensemble();
  return build_ensemble(cfg.ensemble, cfg.qubit, rng);
}

JensenTally jensen_tally() { return {g_jensen_checks.load(), g_jensen_violations.load()}; }

DephasingCurve run_experiment(const RunConfig& cfg, unsigned threads) {
  cfg.validate();
  const std::vector<double> grid = cfg.grid.make();
  const std::size_t n_points = grid.size();
  const std::size_t n_runs = cfg.n_runs;
  const DiffusionEngine engine = cfg.diffusion_engine();

  double max_step = 0.0;
  for (std::size_t k = 1; k < n_points; ++k) max_step = std::max(max_step, grid[k] - grid[k - 1]);
  if (engine.kind == EngineKind::telegraph &&
      0.5 * engine.kappa * engine.n_fluctuators * max_step > kMaxFlipsPerStep) {
    throw NumericError("telegraph engine: more than 1e3 expected flips per grid step");
  }

  std::vector<TlsParams> fixed;
  if (!cfg.resample_ensemble_per_run) {
    fixed = fixed_ensemble(cfg);
    check_markov_preconditions(fixed, cfg.qubit);
  }
  const std::vector<TlsParams>* fixed_ptr = cfg.resample_ensemble_per_run ? nullptr : &fixed;

  std::vector<cplx> exponents(n_runs * n_points);
  std::atomic<std::size_t> next{0};
  std::mutex failure_mutex;
  RunFailure failure;

  auto worker = [&]() {
    MarkovIntegrator integrator(cfg.qubit, cfg.solver);
    if (fixed_ptr != nullptr) integrator.set_ensemble(*fixed_ptr);
    ShiftPath scratch;
    for (std::size_t run = next.fetch_add(1); run < n_runs; run = next.fetch_add(1)) {
      try {
        simulate_run(cfg, run, fixed_ptr, grid, engine, integrator, scratch,
                     std::span<cplx>(exponents).subspan(run * n_points, n_points));
      } catch (...) {
        const std::lock_guard<std::mutex> lock(failure_mutex);
        if (run < failure.run) failure = {run, std::current_exception()};
      }
    }
  };

  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
  threads = static_cast<unsigned>(std::min<std::size_t>(threads, n_runs));
  if (threads <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(threads);
    for (unsigned i = 0; i < threads; ++i) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }
  if (failure.error) rethrow_with_run(failure);

  DephasingCurve curve;
  curve.times = grid;
  curve.n_runs = n_runs;
  curve.m_abs.resize(n_points);
  curve.r_rms.resize(n_points);
  curve.d.resize(n_points);
  curve.d_err.resize(n_points);

  const auto n = static_cast<long double>(n_runs);
  std::vector<cplx> scaled(n_runs);
  std::vector<long double> re(n_runs), im(n_runs), sq(n_runs), jack(n_runs);
  for (std::size_t k = 0; k < n_points; ++k) {
    // Amplitudes relative to the largest run keep every quantity representable.
    double ref = -std::numeric_limits<double>::infinity();
    for (std::size_t r = 0; r < n_runs; ++r) ref = std::max(ref, exponents[r * n_points + k].real());
    for (std::size_t r = 0; r < n_runs; ++r) {
      scaled[r] = std::exp(exponents[r * n_points + k] - ref);
      re[r] = scaled[r].real();
      im[r] = scaled[r].imag();
      sq[r] = std::norm(scaled[r]);
    }
    const long double s_re = pairwise_sum(std::span<const long double>(re));
    const long double s_im = pairwise_sum(std::span<const long double>(im));
    const long double s_sq = pairwise_sum(std::span<const long double>(sq));
    long double m = std::hypot(s_re, s_im) / n;
    const long double r_val = std::sqrt(s_sq / n);

    ++g_jensen_checks;
    if (m > r_val) {
      // Exact mathematically; only rounding can exceed it.
      if (m - r_val > 16.0L * std::numeric_limits<double>::epsilon() * r_val) {
        ++g_jensen_violations;
        throw NumericError("estimator: |<a>| exceeds sqrt(<|a|^2>) at t index " + std::to_string(k));
      }
      m = r_val;
    }
    const long double d = m / r_val;

    for (std::size_t r = 0; r < n_runs; ++r) {
      const long double lr = s_re - re[r];
      const long double li = s_im - im[r];
      const long double lq = std::max(s_sq - sq[r], 0.0L);
      jack[r] = lq > 0.0L ? std::min(1.0L, std::hypot(lr, li) / std::sqrt((n - 1.0L) * lq)) : 1.0L;
    }
    const long double jack_mean = pairwise_sum(std::span<const long double>(jack)) / n;
    for (std::size_t r = 0; r < n_runs; ++r) jack[r] = (jack[r] - jack_mean) * (jack[r] - jack_mean);
    const long double jack_var = (n - 1.0L) / n * pairwise_sum(std::span<const long double>(jack));

    const long double scale = std::exp(static_cast<long double>(ref));
    curve.m_abs[k] = static_cast<double>(m * scale);
    curve.r_rms[k] = static_cast<double>(r_val * scale);
    curve.d[k] = static_cast<double>(d);
    curve.d_err[k] = static_cast<double>(std::sqrt(jack_var));
    if (curve.m_abs[k] > curve.r_rms[k]) curve.m_abs[k] = curve.r_rms[k];
  }
  return curve;
}

PowerLawFit fit_powerlaw(const DephasingCurve& curve, double t_lo, double t_hi) {
  std::vector<double> xs;
  std::vector<double> ys;
  for (std::size_t k = 0; k < curve.times.size(); ++k) {
    const double t = curve.times[k];
    if (t < t_lo || t > t_hi) continue;
    const double d = curve.d[k];
    if (!(d > 0.0 && d < 1.0)) {
      throw FitError("fit_powerlaw: D must lie strictly inside (0, 1) within the window");
    }
    xs.push_back(std::log(t));
    ys.push_back(std::log(-2.0 * std::log(d)));
  }
  if (xs.size() < 5) throw FitError("fit_powerlaw: fewer than 5 grid points in window");
  const double n = static_cast<double>(xs.size());
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    mx += xs[i];
    my += ys[i];
  }
  mx /= n;
  my /= n;
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    sxx += (xs[i] - mx) * (xs[i] - mx);
    sxy += (xs[i] - mx) * (ys[i] - my);
  }
  if (!(sxx > 0.0)) throw FitError("fit_powerlaw: window has no spread in t");
  PowerLawFit fit;
  fit.exponent = sxy / sxx;
  fit.intercept = my - fit.exponent * mx;
  double ssr = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double res = ys[i] - (fit.intercept + fit.exponent * xs[i]);
    ssr += res * res;
  }
  fit.stderr_exponent = std::sqrt(ssr / (n - 2.0) / sxx);
  fit.points = xs.size();
  return fit;
}

}  // namespace dephasim
