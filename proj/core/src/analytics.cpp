#include "dephasim/analytics.hpp"

#include <cmath>
#include <cstdint>
#include <limits>
#include <string>

#include <boost/math/tools/roots.hpp>

#include "dephasim/dynamics.hpp"
#include "dephasim/errors.hpp"

namespace dephasim {

namespace {

using cplx = std::complex<double>;

void require(bool ok, const std::string& what) {
  if (!ok) throw PreconditionError(what);
}

std::vector<BesselWeight> weights_for(const QubitParams& qubit) {
  return bessel_weights(qubit.modulation_ratio());
}

double pow4(double v) { return (v * v) * (v * v); }

// Quasi-static law with diffusion span s: (Gamma t)^2 (s/gamma)^2 (delta/gamma) S4.
double small_span_law(const LawParams& p, double s4, double span, double t) {
  const double r = p.golden_rule_rate() * t * span / p.gamma;
  return r * r * p.delta_typ / p.gamma * s4;
}

}  // namespace

double resonance_sum(const TlsParams& tls, const QubitParams& qubit) {
  const double delta = tls.detuning(qubit);
  double sum = 0.0;
  for (const auto& w : weights_for(qubit)) {
    const double e = delta + w.m * qubit.omega_mod;
    sum += pow4(w.j) / (tls.mu_av * tls.mu_av + e * e);
  }
  return sum;
}

cplx correlator_closed(const TlsParams& tls, const QubitParams& qubit, double t1_thermal, double t1, double t2,
                       CorrelatorRegime regime) {
  require(t1_thermal > 0.0, "correlator_closed: T1T must be positive");
  const double tau = std::abs(t1 - t2);
  const double w_tau = tls.mu_av / t1_thermal * tau;
  const double g4 = pow4(tls.g);
  if (regime == CorrelatorRegime::short_time) {
    require(tls.mu_av >= tls.gamma, "correlator_closed: short regime requires mu_av >= gamma");
    return g4 * tls.mu_av / (8.0 * (2.0 * tls.gamma + w_tau)) * resonance_sum(tls, qubit);
  }
  const auto weights = weights_for(qubit);
  const double delta = tls.detuning(qubit);
  const double second_width = tau < t1_thermal ? tls.gamma + w_tau : tls.gamma + tls.mu_av;
  cplx first = 0.0;
  cplx second = 0.0;
  for (const auto& w : weights) {
    const double e = delta + w.m * qubit.omega_mod;
    const double j2 = w.j * w.j;
    first += j2 / cplx(tls.gamma + tls.mu_av, e);
    second += j2 / cplx(second_width, -e);
  }
  return g4 / 16.0 * first * second;
}

cplx mean_c(const TlsParams& tls, const QubitParams& qubit, CorrelatorRegime regime) {
  const double width = regime == CorrelatorRegime::short_time ? tls.mu_av : tls.gamma + tls.mu_av;
  const double delta = tls.detuning(qubit);
  cplx sum = 0.0;
  for (const auto& w : weights_for(qubit)) {
    sum += w.j * w.j / cplx(width, -(delta + w.m * qubit.omega_mod));
  }
  return 0.25 * tls.g * tls.g * sum;
}

double shorttime_shape(double u) {
  if (u < 1e-3) {
    // 2 sum_{k>=2} (-u)^{k-2} / (k (k-1)).
    double term = 1.0;
    double sum = 0.0;
    for (int k = 2; k < 9; ++k) {
      sum += 2.0 * term / (k * (k - 1.0));
      term *= -u;
    }
    return sum;
  }
  return 2.0 * ((1.0 + u) * std::log1p(u) - u) / (u * u);
}

double cumulant_exact_shorttime(const TlsParams& tls, const QubitParams& qubit, double t1_thermal, double t) {
  require(t >= 0.0, "cumulant_exact_shorttime: t must be non-negative");
  require(t <= t1_thermal, "cumulant_exact_shorttime: requires t <= T1T");
  if (t == 0.0 || tls.mu_av == 0.0) return 0.0;
  const double u = tls.mu_av / t1_thermal * t / tls.gamma;
  const double bracket = 0.5 * t * t / tls.gamma * shorttime_shape(u);
  return pow4(tls.g) * tls.mu_av / 4.0 * bracket * resonance_sum(tls, qubit);
}

double cumulant_quasistatic(const TlsParams& tls, const QubitParams& qubit, double t) {
  return pow4(tls.g) * tls.mu_av / (8.0 * tls.gamma) * resonance_sum(tls, qubit) * t * t;
}

double cumulant_dynamical(const TlsParams& tls, const QubitParams& qubit, double t1_thermal, double t) {
  const double alpha = tls.mu_av / t1_thermal;
  return pow4(tls.g) / 4.0 * t1_thermal * resonance_sum(tls, qubit) * t * std::log(alpha * t / tls.gamma);
}

LawParams LawParams::from(const EnsembleSpec& spec) {
  return {spec.g_max, spec.delta_typ, spec.gamma, spec.mu_av, spec.mu_max, spec.t1_thermal()};
}

LawValue dephasing_law(const LawParams& p, double x, double t) {
  require(p.mu_av > p.gamma, "dephasing_law: requires mu_av > gamma");
  require(p.t1_thermal > 0.0 && std::isfinite(p.t1_thermal), "dephasing_law: T1T must be positive and finite");
  require(t >= 0.0, "dephasing_law: t must be non-negative");
  const double prefactor = pow4(p.g_max) / p.delta_typ * bessel_s4(x);
  auto short_branch = [&](double s) {
    return prefactor * s * s / p.gamma * shorttime_shape(p.mu_av * s / (p.t1_thermal * p.gamma));
  };
  if (t <= p.t1_thermal) {
    return {short_branch(t), t <= p.crossover_time() ? 1 : 2};
  }
  const double slope = 2.0 * prefactor * p.t1_thermal / p.mu_av * std::log1p(p.mu_av / p.gamma);
  return {short_branch(p.t1_thermal) + slope * (t - p.t1_thermal), 3};
}

double small_diffusion_law(const LawParams& p, double x, double t) {
  require(p.mu_max < p.gamma, "small_diffusion_law: requires mu_max < gamma");
  require(p.delta_typ < p.gamma, "small_diffusion_law: requires delta < gamma");
  return small_span_law(p, bessel_s4(x), p.mu_max, t);
}

double ensemble_resonance_sum(std::span<const TlsParams> ensemble, const QubitParams& qubit) {
  double sum = 0.0;
  for (const auto& tls : ensemble) sum += pow4(tls.g) * resonance_sum(tls, qubit);
  return sum;
}

double ensemble_resonance_estimate(const LawParams& p, double x) {
  return bessel_s4(x) * pow4(p.g_max) / (p.delta_typ * p.mu_av);
}

const char* to_string(RegimeClass c) {
  switch (c) {
    case RegimeClass::quasi_static_dominant:
      return "quasi-static-dominant";
    case RegimeClass::dynamical_subdominant:
      return "dynamical-subdominant";
    case RegimeClass::small_diffusion:
      return "small-diffusion";
  }
  return "unknown";
}

RegimeReport crossover_diagnostics(const LawParams& p, double x) {
  RegimeReport r;
  r.gamma_1q = p.golden_rule_rate();
  r.t_crossover = p.crossover_time();
  const double g1t = r.gamma_1q * p.t1_thermal;
  r.neg2lnD_at_crossover = g1t * g1t * bessel_s4(x) * p.gamma * p.delta_typ / (p.mu_av * p.mu_av);
  r.markov_number = p.t1_thermal * p.gamma * (p.gamma / p.mu_av);
  r.markov_ok = r.markov_number > 1.0;
  if (p.mu_max < p.gamma) {
    r.classification = RegimeClass::small_diffusion;
  } else if (r.neg2lnD_at_crossover > kQuasiStaticThreshold) {
    r.classification = RegimeClass::quasi_static_dominant;
  } else {
    r.classification = RegimeClass::dynamical_subdominant;
  }
  r.gamma_phi = effective_dephasing_rate(p, x);
  return r;
}

double effective_dephasing_rate(const LawParams& p, double x, double threshold) {
  require(threshold > 0.0, "effective_dephasing_rate: threshold must be positive");
  const double s4 = bessel_s4(x);
  if (p.mu_max < p.gamma || p.mu_av <= p.gamma) {
    const double span = p.mu_max < p.gamma ? p.mu_max : p.mu_av;
    const double at_unit_time = small_span_law(p, s4, span, 1.0);
    return at_unit_time > 0.0 ? std::sqrt(at_unit_time / threshold) : 0.0;
  }
  auto f = [&](double log_t) { return dephasing_law(p, x, std::exp(log_t)).neg2lnD - threshold; };
  double hi = std::log(p.crossover_time());
  int guard = 0;
  while (f(hi) < 0.0) {
    hi += 1.0;
    if (++guard > 400) throw NumericError("effective_dephasing_rate: threshold never reached");
  }
  double lo = hi - 1.0;
  guard = 0;
  while (f(lo) > 0.0) {
    lo -= 1.0;
    if (++guard > 400) throw NumericError("effective_dephasing_rate: bracket search failed");
  }
  std::uintmax_t iterations = 200;
  const auto [a, b] =
      boost::math::tools::toms748_solve(f, lo, hi, boost::math::tools::eps_tolerance<double>(52), iterations);
  return std::exp(-0.5 * (a + b));
}

double relaxation_cumulant(std::span<const TlsParams> ensemble, const QubitParams& qubit, double t1_thermal,
                           double t) {
  require(t >= 0.0 && t <= t1_thermal, "relaxation_cumulant: requires 0 <= t <= T1T");
  double exponent = 0.0;
  for (const auto& tls : ensemble) {
    exponent -= mean_c(tls, qubit, CorrelatorRegime::long_time).real() * t;
    exponent += 0.5 * cumulant_exact_shorttime(tls, qubit, t1_thermal, t);
  }
  return exponent;
}

ThermalState temperature_map(double temperature, const TemperatureCalibration& cal) {
  require(temperature > 0.0, "temperature_map: T must be positive");
  require(cal.c_mu > 0.0 && cal.c_r > 0.0, "temperature_map: calibration constants must be positive");
  return {cal.c_mu * temperature, 1.0 / (cal.c_r * temperature * temperature * temperature)};
}

std::vector<SweepRow> temperature_sweep(const SweepSpec& spec) {
  require(spec.points >= 2, "temperature_sweep: at least two points");
  require(spec.t_min > 0.0 && spec.t_max > spec.t_min, "temperature_sweep: need 0 < t_min < t_max");
  require(spec.mu_max_ratio >= 1.0, "temperature_sweep: mu_max_ratio must be at least 1");
  const double s4 = bessel_s4(spec.x);
  std::vector<SweepRow> rows;
  rows.reserve(static_cast<std::size_t>(spec.points));
  for (int k = 0; k < spec.points; ++k) {
    const double frac = static_cast<double>(k) / (spec.points - 1);
    const double temperature = spec.t_min * std::pow(spec.t_max / spec.t_min, frac);
    const ThermalState state = temperature_map(temperature, spec.cal);
    LawParams p = spec.base;
    p.mu_av = state.mu_av;
    p.mu_max = spec.mu_max_ratio * state.mu_av;
    p.t1_thermal = state.t1_thermal;
    SweepRow row;
    row.temperature = temperature;
    row.mu_av = state.mu_av;
    row.t1_thermal = state.t1_thermal;
    row.gamma_phi = effective_dephasing_rate(p, spec.x, spec.threshold);
    row.gamma_phi_long = pow4(p.g_max) / p.delta_typ * s4 * p.t1_thermal / p.mu_av;
    rows.push_back(row);
  }
  return rows;
}

}  // namespace dephasim
