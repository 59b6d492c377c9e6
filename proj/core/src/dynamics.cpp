#include "dephasim/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <limits>
#include <string>
#include <tuple>

#include <boost/numeric/odeint.hpp>

#include "dephasim/errors.hpp"

namespace dephasim {

namespace odeint = boost::numeric::odeint;

const char* to_string(SolverMode mode) { return mode == SolverMode::markov ? "markov" : "full"; }

SolverMode solver_mode_from_string(const char* name) {
  if (std::strcmp(name, "markov") == 0) return SolverMode::markov;
  if (std::strcmp(name, "full") == 0) return SolverMode::full;
  throw ConfigError(std::string("unknown solver mode '") + name + "'");
}

void SolverConfig::validate() const {
  if (!(dt > 0.0)) throw ConfigError("solver: dt must be positive");
  if (m_max < 0) throw ConfigError("solver: m_max must be non-negative");
  if (!(bessel_tol > 0.0 && bessel_tol < 1.0)) throw ConfigError("solver: bessel_tol must lie in (0, 1)");
}

double default_time_step(const EnsembleSpec& spec, const QubitParams& qubit, int m_max) {
  double dt = 0.05 / spec.gamma;
  if (spec.r_thermal > 0.0) dt = std::min(dt, 0.05 / spec.r_thermal);
  if (qubit.a_mod > 0.0) {
    dt = std::min(dt, 0.02 / std::abs(m_max * qubit.omega_mod + spec.band_halfwidth));
  }
  return dt;
}

cplx coefficient_c(const TlsParams& tls, const QubitParams& qubit, double eps_t,
                   std::span<const BesselWeight> weights) {
  cplx sum = 0.0;
  for (const auto& w : weights) {
    const double d = qubit.e0 + w.m * qubit.omega_mod - eps_t;
    sum += w.j * w.j / cplx(tls.gamma, -d);
  }
  return 0.25 * tls.g * tls.g * sum;
}

MarkovIntegrator::MarkovIntegrator(const QubitParams& qubit, const SolverConfig& cfg) : qubit_(qubit) {
  cfg.validate();
  for (const auto& w : bessel_weights(qubit.modulation_ratio(), cfg.bessel_tol)) {
    if (std::abs(w.m) > cfg.m_max) continue;
    weights_.push_back(w);
    sidebands_.push_back({w.j * w.j, w.m * qubit.omega_mod});
  }
}

void MarkovIntegrator::set_ensemble(std::span<const TlsParams> ensemble) {
  tls_.clear();
  tls_.reserve(ensemble.size());
  for (const auto& t : ensemble) tls_.push_back({0.25 * t.g * t.g, t.gamma, t.detuning(qubit_)});
}

cplx MarkovIntegrator::rate(std::size_t n, double shift) const {
  const Tls& t = tls_[n];
  const double d = t.detuning - shift;
  const double g2 = t.gamma * t.gamma;
  double re = 0.0;
  double im = 0.0;
  for (const auto& s : sidebands_) {
    const double e = d + s.offset;
    const double w = s.weight / (g2 + e * e);
    re += w * t.gamma;
    im += w * e;
  }
  return {t.g2_quarter * re, t.g2_quarter * im};
}

void MarkovIntegrator::accumulate(std::size_t n, const ShiftPath& path, std::span<const double> grid,
                                  std::span<cplx> exponent) const {
  cplx c = rate(n, path.x);
  cplx integral = 0.0;
  double t_prev = 0.0;
  std::size_t j = 0;
  const std::size_t jumps = path.jump_times.size();
  for (std::size_t k = 0; k < grid.size(); ++k) {
    const double t_k = grid[k];
    while (j < jumps && path.jump_times[j] < t_k) {
      const double t_j = path.jump_times[j];
      integral += c * (t_j - t_prev);
      t_prev = t_j;
      c = rate(n, path.x + path.values[j]);
      ++j;
    }
    integral += c * (t_k - t_prev);
    t_prev = t_k;
    exponent[k] -= integral;
  }
}

void check_markov_preconditions(std::span<const TlsParams> ensemble, const QubitParams& qubit) {
  for (std::size_t n = 0; n < ensemble.size(); ++n) {
    const auto& t = ensemble[n];
    if (t.g > t.gamma) {
      throw PreconditionError("TLS " + std::to_string(n) + ": weak coupling requires g <= gamma");
    }
    if (qubit.a_mod > 0.0 && !(qubit.omega_mod > t.gamma && qubit.omega_mod > t.g)) {
      throw PreconditionError("TLS " + std::to_string(n) + ": modulation requires Omega > gamma and Omega > g");
    }
  }
}

void accumulate_realization(const MarkovIntegrator& integrator, std::span<const TlsParams> ensemble,
                            const DiffusionEngine& engine, const RunStreams& streams,
                            std::span<const double> grid, std::span<cplx> exponent, ShiftPath& scratch) {
  const double t_end = grid.back();
  for (std::size_t n = 0; n < ensemble.size(); ++n) {
    RandomStream rng = streams.tls(n);
    engine.realize(ensemble[n], t_end, rng, scratch);
    integrator.accumulate(n, scratch, grid, exponent);
  }
}

namespace {

void require_grid(std::span<const double> grid) {
  if (grid.empty() || grid.front() != 0.0) throw PreconditionError("time grid must start at 0");
  for (std::size_t k = 1; k < grid.size(); ++k) {
    if (!(grid[k] > grid[k - 1])) throw PreconditionError("time grid must be strictly increasing");
  }
}

AmplitudeRecord from_exponent(std::span<const double> grid, const std::vector<cplx>& exponent) {
  AmplitudeRecord rec;
  rec.times.assign(grid.begin(), grid.end());
  rec.a.reserve(exponent.size());
  for (const auto& e : exponent) rec.a.push_back(std::exp(e));
  return rec;
}

}  // namespace

AmplitudeRecord evolve_markov(std::span<const TlsParams> ensemble, const QubitParams& qubit,
                              const DiffusionEngine& engine, std::span<const double> grid,
                              const RunStreams& streams, const SolverConfig& cfg) {
  require_grid(grid);
  check_markov_preconditions(ensemble, qubit);
  MarkovIntegrator integrator(qubit, cfg);
  integrator.set_ensemble(ensemble);
  std::vector<cplx> exponent(grid.size(), 0.0);
  ShiftPath scratch;
  accumulate_realization(integrator, ensemble, engine, streams, grid, exponent, scratch);
  AmplitudeRecord rec = from_exponent(grid, exponent);
  rec.seed = streams.seed;
  rec.run = streams.run;
  rec.engine = to_string(engine.kind);
  return rec;
}

AmplitudeRecord evolve_markov_paths(std::span<const TlsParams> ensemble, const QubitParams& qubit,
                                    std::span<const ShiftPath> paths, std::span<const double> grid,
                                    const SolverConfig& cfg) {
  require_grid(grid);
  check_markov_preconditions(ensemble, qubit);
  if (paths.size() != ensemble.size()) throw PreconditionError("evolve_markov_paths: one path per TLS");
  MarkovIntegrator integrator(qubit, cfg);
  integrator.set_ensemble(ensemble);
  std::vector<cplx> exponent(grid.size(), 0.0);
  for (std::size_t n = 0; n < ensemble.size(); ++n) integrator.accumulate(n, paths[n], grid, exponent);
  AmplitudeRecord rec = from_exponent(grid, exponent);
  rec.engine = "given";
  return rec;
}

AmplitudeRecord evolve_full(std::span<const TlsParams> ensemble, const QubitParams& qubit,
                            std::span<const ShiftPath> paths, std::span<const double> grid) {
  require_grid(grid);
  if (ensemble.size() > kFullSolverMaxTls) throw PreconditionError("evolve_full: at most 64 TLSs");
  if (paths.size() != ensemble.size()) throw PreconditionError("evolve_full: one path per TLS");
  const std::size_t n_tls = ensemble.size();

  // Static part of each TLS phase rate and the current segment value.
  std::vector<double> static_rate(n_tls);
  std::vector<double> shift(n_tls);
  double gamma_max = 0.0;
  for (std::size_t n = 0; n < n_tls; ++n) {
    static_rate[n] = ensemble[n].detuning(qubit) - paths[n].x;
    shift[n] = 0.0;
    gamma_max = std::max(gamma_max, ensemble[n].gamma);
  }

  // Every jump as (time, tls, new y), time ordered.
  std::vector<std::tuple<double, std::size_t, double>> jumps;
  for (std::size_t n = 0; n < n_tls; ++n) {
    for (std::size_t j = 0; j < paths[n].jump_times.size(); ++j) {
      if (paths[n].jump_times[j] < grid.back()) jumps.emplace_back(paths[n].jump_times[j], n, paths[n].values[j]);
    }
  }
  std::sort(jumps.begin(), jumps.end());

  using State = std::vector<cplx>;
  auto rhs = [&](const State& s, State& ds, double t) {
    const double mod = qubit.a_mod > 0.0 ? qubit.a_mod * std::cos(qubit.omega_mod * t) : 0.0;
    cplx da = 0.0;
    for (std::size_t n = 0; n < n_tls; ++n) {
      const auto& tls = ensemble[n];
      const cplx b = s[n + 1];
      da += tls.g * b;
      ds[n + 1] = cplx(-tls.gamma, static_rate[n] + mod - shift[n]) * b - cplx(0.0, 0.5 * tls.g) * s[0];
    }
    ds[0] = cplx(0.0, -0.5) * da;
  };

  State state(n_tls + 1, 0.0);
  state[0] = 1.0;
  auto stepper = odeint::make_controlled(1e-8, 1e-8, odeint::runge_kutta_dopri5<State>());

  AmplitudeRecord rec;
  rec.times.assign(grid.begin(), grid.end());
  rec.engine = "given";
  auto record = [&]() {
    double norm = 0.0;
    for (const auto& v : state) norm += std::norm(v);
    rec.a.push_back(state[0]);
    rec.norm.push_back(norm);
  };

  const double dt_guess = gamma_max > 0.0 ? 0.01 / gamma_max : grid.back() * 1e-3;
  double t = 0.0;
  std::size_t j = 0;
  record();
  try {
    for (std::size_t k = 1; k < grid.size(); ++k) {
      while (t < grid[k]) {
        while (j < jumps.size() && std::get<0>(jumps[j]) <= t) {
          shift[std::get<1>(jumps[j])] = std::get<2>(jumps[j]);
          ++j;
        }
        const double t_next = j < jumps.size() ? std::min(grid[k], std::get<0>(jumps[j])) : grid[k];
        if (t_next > t) {
          odeint::integrate_adaptive(stepper, rhs, state, t, t_next, std::min(dt_guess, t_next - t));
        }
        t = t_next;
      }
      record();
    }
  } catch (const odeint::odeint_error& e) {
    throw NumericError(std::string("evolve_full: step control failed: ") + e.what());
  }
  for (const auto& v : rec.a) {
    if (!std::isfinite(v.real()) || !std::isfinite(v.imag())) throw NumericError("evolve_full: non-finite amplitude");
  }
  return rec;
}

}  // namespace dephasim
