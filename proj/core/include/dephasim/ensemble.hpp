#pragma once

#include <cstddef>
#include <vector>

#include "dephasim/random.hpp"

namespace dephasim {

// Qubit splitting and harmonic modulation E0 + A cos(Omega t).
struct QubitParams {
  double e0 = 0.0;         // rad/s
  double a_mod = 0.0;      // rad/s
  double omega_mod = 0.0;  // rad/s

  // A / Omega, zero without modulation.
  double modulation_ratio() const { return a_mod > 0.0 ? a_mod / omega_mod : 0.0; }
  // Throws ConfigError when e0 <= 0, a_mod < 0, or a_mod > 0 with omega_mod <= 0.
  void validate() const;
};

// Statistical description of the quantum-TLS population around the qubit.
struct EnsembleSpec {
  double delta_typ = 0.0;       // typical level spacing, rad/s
  double g_max = 0.0;           // rad/s
  double g_min = 0.0;           // rad/s
  double band_halfwidth = 0.0;  // rad/s
  double gamma = 0.0;           // TLS linewidth, rad/s
  double mu_av = 0.0;           // diffusion span, rad/s
  double mu_max = 0.0;          // maximal diffusion span, rad/s
  double r_thermal = 0.0;       // thermal switching rate 1/T1T, 1/s; zero freezes diffusion

  double t1_thermal() const;
  // Throws ConfigError unless 0 < g_min < g_max <= gamma, delta_typ > 0,
  // 0 <= mu_av <= mu_max, band_halfwidth >= 0 and r_thermal >= 0.
  void validate() const;
};

struct TlsParams {
  double eps0 = 0.0;    // rad/s
  double g = 0.0;       // rad/s
  double gamma = 0.0;   // rad/s
  double mu_av = 0.0;   // rad/s
  double mu_max = 0.0;  // rad/s

  double detuning(const QubitParams& q) const { return q.e0 - eps0; }
};

// Coupling density p(g) proportional to sqrt(1 - g^2/g_max^2)/g on [g_min, g_max].
double sample_coupling(const EnsembleSpec& spec, RandomStream& rng);

// I(g_min) = integral of sqrt(1 - g^2/g_max^2)/g over [g_min, g_max], by quadrature.
double coupling_count_integral(const EnsembleSpec& spec);

// Mean TLS count (2 B / delta_typ) I(g_min).
double expected_tls_count(const EnsembleSpec& spec);

// Poisson-many TLSs with splittings uniform in [E0 - B, E0 + B].
// Throws ConfigError when band_halfwidth < mu_max.
std::vector<TlsParams> build_ensemble(const EnsembleSpec& spec, const QubitParams& qubit,
                                      RandomStream& rng);

// Gamma_1q = g_max^2 / delta_typ.
double golden_rule_rate(const EnsembleSpec& spec);

}  // namespace dephasim
