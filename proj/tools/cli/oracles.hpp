#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "dephasim/diffusion.hpp"
#include "dephasim/dynamics.hpp"
#include "dephasim/stats.hpp"

namespace dephasim::cli {

struct DiffusionOracleReport {
  std::size_t samples = 0;
  double t_short = 0.0;  // 0.05 / kappa
  double t_long = 0.0;   // 10 / kappa
  KsResult telegraph_short;   // y(t_short) vs the Lorentzian propagator
  KsResult ka_short;          // same for the ka engine
  KsResult engines_short;     // telegraph vs ka, two-sample
  KsResult telegraph_stationary;  // x + y(t_long) vs the truncated Lorentzian
};

// Sample i of every engine uses its own stream (seed, i, 0). Requires kappa > 0 and mu_av > 0.
DiffusionOracleReport diffusion_oracle(const ThermalBathParams& bath, std::size_t samples, std::uint64_t seed);

struct SolverComparison {
  std::size_t runs = 0;
  double max_rel_dev = 0.0;  // max over runs and grid of | |a_markov| - |a_full| | / |a_full|
  double t_at_max = 0.0;     // s
  double max_norm = 0.0;     // largest |a|^2 + sum |b|^2 seen by the full solver
};

// Markov product solution and full coupled equations on shared shift paths, runs streams
// (seed, r). Requires a grid starting at 0.
SolverComparison compare_solvers(std::span<const TlsParams> ensemble, const QubitParams& qubit,
                                 const DiffusionEngine& engine, std::span<const double> grid, std::size_t runs,
                                 std::uint64_t seed, const SolverConfig& cfg = {});

}  // namespace dephasim::cli
