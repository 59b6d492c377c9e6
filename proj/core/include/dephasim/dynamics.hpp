#pragma once

#include <complex>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "dephasim/diffusion.hpp"
#include "dephasim/ensemble.hpp"
#include "dephasim/random.hpp"

namespace dephasim {

using cplx = std::complex<double>;

enum class SolverMode { markov, full };

const char* to_string(SolverMode mode);
SolverMode solver_mode_from_string(const char* name);

struct SolverConfig {
  double dt = 1e-9;  // s; step of the ka engine
  int m_max = 64;    // sideband cutoff, |m| <= m_max
  SolverMode mode = SolverMode::markov;
  double bessel_tol = 1e-12;

  // Throws ConfigError unless dt > 0, m_max >= 0 and 0 < bessel_tol < 1.
  void validate() const;
};

// min(0.05/gamma, 0.05 T1T, 0.02/|m_max Omega + B|); the last term only with modulation.
double default_time_step(const EnsembleSpec& spec, const QubitParams& qubit, int m_max);

struct AmplitudeRecord {
  std::vector<double> times;
  std::vector<cplx> a;
  std::vector<double> norm;  // |a|^2 + sum |b_n|^2, full solver only
  std::uint64_t seed = 0;
  std::uint64_t run = 0;
  std::string engine;
};

struct BesselWeight {
  int m;
  double j;  // J_m(x)
};

// J_m(x) for |m| <= M, M the smallest integer >= x + 20 with sum J_m^2 >= 1 - tol.
// Miller backward recurrence normalized by J_0^2 + 2 sum_{m>0} J_m^2 = 1, sign fixed by
// J_0 + 2 sum_k J_{2k} = 1. Ordered by m ascending.
std::vector<BesselWeight> bessel_weights(double x, double tol = 1e-14);

// S4(x) = sum_m J_m(x)^4.
double bessel_s4(double x);

// (g^2/4) sum_m J_m^2 / (gamma - i (E0 + m Omega - eps_t)).
cplx coefficient_c(const TlsParams& tls, const QubitParams& qubit, double eps_t,
                   std::span<const BesselWeight> weights);

// Exact integration of C_n over piecewise-constant shift paths. Stateless after construction.
class MarkovIntegrator {
 public:
  MarkovIntegrator(const QubitParams& qubit, const SolverConfig& cfg);

  void set_ensemble(std::span<const TlsParams> ensemble);
  std::size_t size() const { return tls_.size(); }

  // C_n at total spectral shift s = x + y.
  cplx rate(std::size_t n, double shift) const;

  // exponent[k] -= int_0^{grid[k]} C_n dt for the given path. grid starts at 0, increasing.
  void accumulate(std::size_t n, const ShiftPath& path, std::span<const double> grid,
                  std::span<cplx> exponent) const;

  std::span<const BesselWeight> weights() const { return weights_; }

 private:
  struct Tls {
    double g2_quarter;
    double gamma;
    double detuning;
  };
  struct Sideband {
    double weight;  // J_m^2
    double offset;  // m Omega
  };
  QubitParams qubit_;
  std::vector<BesselWeight> weights_;
  std::vector<Sideband> sidebands_;
  std::vector<Tls> tls_;
};

// Throws PreconditionError naming the offending TLS unless g <= gamma for every TLS and,
// with modulation, Omega > gamma and Omega > g.
void check_markov_preconditions(std::span<const TlsParams> ensemble, const QubitParams& qubit);

// Draws one path per TLS from streams.tls(n) and adds -sum_n int C_n to exponent.
void accumulate_realization(const MarkovIntegrator& integrator, std::span<const TlsParams> ensemble,
                            const DiffusionEngine& engine, const RunStreams& streams,
                            std::span<const double> grid, std::span<cplx> exponent, ShiftPath& scratch);

// a(t) = prod_n exp(-int_0^t C_n) for one realization of every TLS path.
AmplitudeRecord evolve_markov(std::span<const TlsParams> ensemble, const QubitParams& qubit,
                              const DiffusionEngine& engine, std::span<const double> grid,
                              const RunStreams& streams, const SolverConfig& cfg = {});

// Same product solution on given paths.
AmplitudeRecord evolve_markov_paths(std::span<const TlsParams> ensemble, const QubitParams& qubit,
                                    std::span<const ShiftPath> paths, std::span<const double> grid,
                                    const SolverConfig& cfg = {});

// Coupled single-excitation equations in the frame rotating with each TLS phase:
//   da/dt   = -(i/2) sum_n g_n b_n
//   db_n/dt = [-gamma_n + i (Delta_n + A cos(Omega t) - x_n - y_n(t))] b_n - (i/2) g_n a
// Dormand-Prince with absolute and relative tolerance 1e-8, restarted at every path jump.
// Requires at most 64 TLSs. Throws NumericError if step control fails.
AmplitudeRecord evolve_full(std::span<const TlsParams> ensemble, const QubitParams& qubit,
                            std::span<const ShiftPath> paths, std::span<const double> grid);

inline constexpr std::size_t kFullSolverMaxTls = 64;

}  // namespace dephasim
