#include "oracles.hpp"

#include <algorithm>
#include <cmath>

#include "dephasim/errors.hpp"

namespace dephasim::cli {

DiffusionOracleReport diffusion_oracle(const ThermalBathParams& bath, std::size_t samples, std::uint64_t seed) {
  bath.validate();
  if (!(bath.kappa > 0.0 && bath.mu_av > 0.0)) {
    throw PreconditionError("diffusion oracle: needs kappa > 0 and mu_av > 0");
  }
  if (samples < 2) throw PreconditionError("diffusion oracle: at least two samples");
  DiffusionOracleReport report;
  report.samples = samples;
  report.t_short = 0.05 / bath.kappa;
  report.t_long = 10.0 / bath.kappa;
  const double ka_dt = report.t_short / 5.0;

  std::vector<double> tele_short(samples);
  std::vector<double> ka_short(samples);
  std::vector<double> tele_long(samples);
  ShiftPath path;
  for (std::size_t i = 0; i < samples; ++i) {
    RandomStream rng(seed, i, 0);
    telegraph_path(bath, report.t_short, rng, path);
    tele_short[i] = path.y_at(report.t_short);
    ka_path(bath, report.t_short, ka_dt, rng, path);
    ka_short[i] = path.y_at(report.t_short);
    telegraph_path(bath, report.t_long, rng, path);
    tele_long[i] = path.x + path.y_at(report.t_long);
  }
  auto propagator = [&](double y) { return propagator_cdf(y, report.t_short, bath); };
  auto stationary = [&](double z) { return truncated_lorentzian_cdf(z, bath.mu_av, bath.mu_max); };
  report.telegraph_short = ks_test(tele_short, propagator);
  report.ka_short = ks_test(ka_short, propagator);
  report.engines_short = ks_two_sample(tele_short, ka_short);
  report.telegraph_stationary = ks_test(tele_long, stationary);
  return report;
}

SolverComparison compare_solvers(std::span<const TlsParams> ensemble, const QubitParams& qubit,
                                 const DiffusionEngine& engine, std::span<const double> grid, std::size_t runs,
                                 std::uint64_t seed, const SolverConfig& cfg) {
  if (runs == 0) throw PreconditionError("compare_solvers: at least one run");
  SolverComparison out;
  out.runs = runs;
  std::vector<ShiftPath> paths(ensemble.size());
  for (std::size_t r = 0; r < runs; ++r) {
    const RunStreams streams{seed, r};
    for (std::size_t n = 0; n < ensemble.size(); ++n) {
      RandomStream rng = streams.tls(n);
      engine.realize(ensemble[n], grid.back(), rng, paths[n]);
    }
    const AmplitudeRecord markov = evolve_markov_paths(ensemble, qubit, paths, grid, cfg);
    const AmplitudeRecord full = evolve_full(ensemble, qubit, paths, grid);
    for (std::size_t k = 0; k < grid.size(); ++k) {
      const double ref = std::abs(full.a[k]);
      if (!(ref > 0.0)) throw NumericError("compare_solvers: full amplitude vanished");
      const double dev = std::abs(std::abs(markov.a[k]) - ref) / ref;
      if (dev > out.max_rel_dev) {
        out.max_rel_dev = dev;
        out.t_at_max = grid[k];
      }
      out.max_norm = std::max(out.max_norm, full.norm[k]);
    }
  }
  return out;
}

}  // namespace dephasim::cli
