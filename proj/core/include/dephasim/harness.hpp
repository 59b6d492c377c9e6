#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "dephasim/diffusion.hpp"
#include "dephasim/dynamics.hpp"
#include "dephasim/ensemble.hpp"

namespace dephasim {

enum class GridSpacing { linear, log };

const char* to_string(GridSpacing spacing);
GridSpacing spacing_from_string(const char* name);

// First point 0. Linear: points evenly up to stop. Log: 0 followed by points - 1 log-spaced values
// from log_start to stop.
struct GridSpec {
  double stop = 0.0;  // s
  std::size_t points = 0;
  GridSpacing spacing = GridSpacing::linear;
  double log_start = 0.0;  // s, log spacing only

  // Throws ConfigError unless the grid is strictly increasing from 0 with at least two points.
  void validate() const;
  std::vector<double> make() const;
};

struct RunConfig {
  std::size_t n_runs = 0;
  std::uint64_t seed = 0;
  GridSpec grid;
  EngineKind engine = EngineKind::telegraph;
  int n_fluctuators = 64;
  SolverConfig solver;
  EnsembleSpec ensemble;
  QubitParams qubit;
  bool resample_ensemble_per_run = false;

  void validate() const;
  DiffusionEngine diffusion_engine() const;
};

struct DephasingCurve {
  std::vector<double> times;
  std::vector<double> m_abs;  // |<a>|
  std::vector<double> r_rms;  // sqrt(<|a|^2>)
  std::vector<double> d;      // m_abs / r_rms
  std::vector<double> d_err;  // leave-one-run-out jackknife
  std::size_t n_runs = 0;
};

// Monte Carlo over cfg.n_runs realizations with per-(seed, run, TLS) streams. Every run uses fresh
// paths (and a fresh ensemble if resample_ensemble_per_run). Results do not depend on threads
// (0 selects the hardware concurrency). Errors are rethrown with the run index attached.
DephasingCurve run_experiment(const RunConfig& cfg, unsigned threads = 0);

// The ensemble used by every run when resample_ensemble_per_run is off.
std::vector<TlsParams> fixed_ensemble(const RunConfig& cfg);

struct JensenTally {
  std::uint64_t checks = 0;
  std::uint64_t violations = 0;
};

// Process-wide count of estimator points checked for |<a>| <= sqrt(<|a|^2>).
JensenTally jensen_tally();

struct PowerLawFit {
  double exponent = 0.0;
  double stderr_exponent = 0.0;
  double intercept = 0.0;
  std::size_t points = 0;
};

// OLS of ln(-2 ln D) on ln t over grid points with t_lo <= t <= t_hi.
// Throws FitError with fewer than 5 points or any D outside (0, 1) in the window.
PowerLawFit fit_powerlaw(const DephasingCurve& curve, double t_lo, double t_hi);

struct RunTiming {
  double wall_seconds = 0.0;
  unsigned threads = 0;
};

struct RunRecord {
  RunConfig cfg;
  DephasingCurve curve;
  std::string code_version;
  RunTiming timing;
};

inline constexpr int kRunRecordSchemaVersion = 1;

// Writes the JSON record at path and the curve CSV (t_us,M,R,D,D_err) next to it with extension .csv.
void persist_run(const RunConfig& cfg, const DephasingCurve& curve, const std::filesystem::path& path,
                 const RunTiming& timing = {});
// Throws SchemaError on a version mismatch or malformed files; nothing is returned partially.
RunRecord load_run(const std::filesystem::path& path);

std::filesystem::path curve_csv_path(const std::filesystem::path& record_path);
std::string curve_csv(const DephasingCurve& curve);

}  // namespace dephasim
