#include <cmath>
#include <vector>

#include <benchmark/benchmark.h>

#include "dephasim/diffusion.hpp"
#include "dephasim/dynamics.hpp"
#include "dephasim/harness.hpp"

using namespace dephasim;

namespace {

ThermalBathParams bath(int n_fluctuators) {
  ThermalBathParams b;
  b.kappa = 1.0;
  b.mu_av = 1.0;
  b.mu_max = 10.0;
  b.n_fluctuators = n_fluctuators;
  return b;
}

void BM_BesselWeights(benchmark::State& state) {
  const double x = static_cast<double>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(bessel_weights(x));
}
BENCHMARK(BM_BesselWeights)->Arg(1)->Arg(10)->Arg(100);

void BM_TelegraphPath(benchmark::State& state) {
  const auto b = bath(static_cast<int>(state.range(0)));
  ShiftPath path;
  std::uint64_t i = 0;
  for (auto _ : state) {
    RandomStream rng(1, i++, 0);
    telegraph_path(b, 1.0, rng, path);
    benchmark::DoNotOptimize(path.values.data());
  }
}
BENCHMARK(BM_TelegraphPath)->Arg(64)->Arg(256);

void BM_KaPath(benchmark::State& state) {
  const auto b = bath(64);
  ShiftPath path;
  std::uint64_t i = 0;
  for (auto _ : state) {
    RandomStream rng(1, i++, 0);
    ka_path(b, 1.0, 0.01, rng, path);
    benchmark::DoNotOptimize(path.values.data());
  }
}
BENCHMARK(BM_KaPath);

void BM_MarkovAccumulate(benchmark::State& state) {
  const QubitParams q{1000.0, static_cast<double>(state.range(0)) * 50.0, 50.0};
  MarkovIntegrator integ(q, SolverConfig{});
  const std::vector<TlsParams> ens{{1000.0, 0.3, 1.0, 1.0, 10.0}};
  integ.set_ensemble(ens);
  RandomStream rng(2, 0, 0);
  ShiftPath path;
  telegraph_path(bath(64), 10.0, rng, path);
  std::vector<double> grid(101);
  for (std::size_t k = 0; k < grid.size(); ++k) grid[k] = 0.1 * static_cast<double>(k);
  std::vector<cplx> exponent(grid.size());
  for (auto _ : state) {
    integ.accumulate(0, path, grid, exponent);
    benchmark::DoNotOptimize(exponent.data());
  }
}
BENCHMARK(BM_MarkovAccumulate)->Arg(0)->Arg(10);

void BM_RunExperiment(benchmark::State& state) {
  RunConfig cfg;
  cfg.n_runs = 100;
  cfg.seed = 1;
  cfg.grid = {5.0, 21, GridSpacing::linear, 0.0};
  cfg.ensemble.delta_typ = 0.5;
  cfg.ensemble.g_max = 0.3;
  cfg.ensemble.g_min = 0.015;
  cfg.ensemble.band_halfwidth = 10.0;
  cfg.ensemble.gamma = 1.0;
  cfg.ensemble.mu_av = 1.0;
  cfg.ensemble.mu_max = 5.0;
  cfg.ensemble.r_thermal = 0.1;
  cfg.qubit = {1000.0, 0.0, 0.0};
  cfg.solver.dt = 0.01;
  for (auto _ : state) benchmark::DoNotOptimize(run_experiment(cfg, 1));
}
BENCHMARK(BM_RunExperiment)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
