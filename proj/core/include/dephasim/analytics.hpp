#pragma once

#include <complex>
#include <span>
#include <string>
#include <vector>

#include "dephasim/ensemble.hpp"

namespace dephasim {

enum class CorrelatorRegime { short_time, long_time };

// <C_n(t1) C_n*(t2)>. Short: g^4 mu/(8 (2 gamma + W(|t1 - t2|))) sum_m J_m^4/(mu^2 + (Delta + m Omega)^2)
// with W(tau) = mu tau / T1T; requires mu_av >= gamma. Long: the stationary double sideband sum with
// second factor gamma + W(|t1 - t2|) below T1T and gamma + mu_av beyond it.
std::complex<double> correlator_closed(const TlsParams& tls, const QubitParams& qubit, double t1_thermal,
                                       double t1, double t2, CorrelatorRegime regime);

// <C_n>. Short: (g^2/4) sum J_m^2/(mu - i(Delta + m Omega)). Long: the same with gamma + mu.
std::complex<double> mean_c(const TlsParams& tls, const QubitParams& qubit, CorrelatorRegime regime);

// sum_m J_m^4 / (mu_av^2 + (Delta + m Omega)^2).
double resonance_sum(const TlsParams& tls, const QubitParams& qubit);

// (g^4 mu/4) [-t/alpha + (alpha t + gamma)/alpha^2 ln(1 + alpha t/gamma)] resonance_sum, alpha = mu/T1T.
// Requires 0 <= t <= T1T.
double cumulant_exact_shorttime(const TlsParams& tls, const QubitParams& qubit, double t1_thermal, double t);
// Small-time limit (g^4 mu / (8 gamma)) resonance_sum t^2.
double cumulant_quasistatic(const TlsParams& tls, const QubitParams& qubit, double t);
// Intermediate-time form (g^4/4) T1T resonance_sum t ln(alpha t / gamma).
double cumulant_dynamical(const TlsParams& tls, const QubitParams& qubit, double t1_thermal, double t);

// 2 [(1 + u) ln(1 + u) - u] / u^2, equal to 1 at u = 0 and decreasing.
double shorttime_shape(double u);

// Ensemble-level parameters of the dephasing law.
struct LawParams {
  double g_max = 0.0;
  double delta_typ = 0.0;
  double gamma = 0.0;
  double mu_av = 0.0;
  double mu_max = 0.0;
  double t1_thermal = 0.0;

  static LawParams from(const EnsembleSpec& spec);
  double golden_rule_rate() const { return g_max * g_max / delta_typ; }
  double crossover_time() const { return gamma / mu_av * t1_thermal; }
};

struct LawValue {
  double neg2lnD = 0.0;
  int branch = 0;  // 1: t <= t_crossover, 2: up to T1T, 3: beyond T1T
};

// P = (g_max^4/delta) S4(x). For t <= T1T: P (t^2/gamma) shorttime_shape(mu t/(T1T gamma)).
// Beyond T1T: continued linearly with slope 2 P (T1T/mu) ln(1 + mu/gamma), which equals the
// left derivative at T1T. Requires mu_av > gamma.
LawValue dephasing_law(const LawParams& p, double x, double t);

// (Gamma_1q t)^2 (mu_max/gamma)^2 (delta/gamma) S4(x). Requires mu_max < gamma and delta < gamma.
double small_diffusion_law(const LawParams& p, double x, double t);

// sum_n g_n^4 sum_m J_m^4/(mu^2 + (Delta_n + m Omega)^2) over an explicit ensemble.
double ensemble_resonance_sum(std::span<const TlsParams> ensemble, const QubitParams& qubit);
// The density-of-states estimate S4(x) g_max^4 / (delta mu_av) of the same sum.
double ensemble_resonance_estimate(const LawParams& p, double x);

enum class RegimeClass { quasi_static_dominant, dynamical_subdominant, small_diffusion };

const char* to_string(RegimeClass c);

struct RegimeReport {
  double t_crossover = 0.0;
  double neg2lnD_at_crossover = 0.0;
  double markov_number = 0.0;
  bool markov_ok = false;
  RegimeClass classification = RegimeClass::quasi_static_dominant;
  double gamma_1q = 0.0;
  double gamma_phi = 0.0;
};

inline constexpr double kQuasiStaticThreshold = 1.0;

// t~ = (gamma/mu) T1T; -2lnD(t~) = (Gamma_1q T1T)^2 S4 gamma delta / mu^2; Markov number T1T gamma^2/mu.
RegimeReport crossover_diagnostics(const LawParams& p, double x);

// 1/t_phi with -2lnD(t_phi) = threshold. mu_max < gamma: small-diffusion law. mu_av > gamma: the
// dephasing law. Otherwise the small-diffusion form with span mu_av, continuous with the
// dephasing law at mu_av = gamma.
double effective_dephasing_rate(const LawParams& p, double x, double threshold = kQuasiStaticThreshold);

// -sum_n Re<C_n> t + sum_n int int <dC'_n dC'_n>, the second term taken as half the exact
// short-time cumulant. Requires t <= T1T.
double relaxation_cumulant(std::span<const TlsParams> ensemble, const QubitParams& qubit, double t1_thermal,
                           double t);

struct TemperatureCalibration {
  double c_mu = 0.0;  // rad/s per K
  double c_r = 0.0;   // 1/(s K^3)
};

struct ThermalState {
  double mu_av = 0.0;
  double t1_thermal = 0.0;
};

ThermalState temperature_map(double temperature, const TemperatureCalibration& cal);

struct SweepSpec {
  LawParams base;            // g_max, delta_typ, gamma used; mu_av, mu_max, T1T replaced per T
  double mu_max_ratio = 1.0;  // mu_max / mu_av
  double x = 0.0;            // A / Omega
  TemperatureCalibration cal;
  double t_min = 0.0;  // K
  double t_max = 0.0;  // K
  int points = 0;      // log-spaced
  double threshold = kQuasiStaticThreshold;
};

struct SweepRow {
  double temperature = 0.0;
  double mu_av = 0.0;
  double t1_thermal = 0.0;
  double gamma_phi = 0.0;
  // Long-time estimate (g_max^4/delta) S4 T1T / mu_av.
  double gamma_phi_long = 0.0;
};

std::vector<SweepRow> temperature_sweep(const SweepSpec& spec);

}  // namespace dephasim
