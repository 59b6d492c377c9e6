#include <cmath>
#include <functional>
#include <limits>
#include <numbers>
#include <vector>

#include <gtest/gtest.h>

#include "dephasim/analytics.hpp"
#include "dephasim/dynamics.hpp"
#include "dephasim/ensemble.hpp"
#include "dephasim/errors.hpp"
#include "dephasim/units.hpp"
#include "oracles.hpp"

using namespace dephasim;

namespace {

// Reference ensemble: delta = 0.8 MHz, T1q = 20 us, gamma = 0.5 MHz, mu_av = 5 MHz, T1T = 1 ms.
LawParams reference_law() {
  LawParams p;
  p.delta_typ = units::from_mhz(0.8);
  p.g_max = std::sqrt(p.delta_typ / 20e-6);
  p.gamma = units::from_mhz(0.5);
  p.mu_av = units::from_mhz(5.0);
  p.mu_max = units::from_mhz(50.0);
  p.t1_thermal = 1e-3;
  return p;
}

double oracle_resonance_sum(double mu, double delta, double x, double omega) {
  double s = 0.0;
  const int m_max = static_cast<int>(x) + 40;
  for (int m = -m_max; m <= m_max; ++m) {
    const double e = delta + m * omega;
    s += std::pow(oracle::bessel_j(m, x), 4) / (mu * mu + e * e);
  }
  return s;
}

// Short branch of the law through the independent kernel: 2 P int_0^t (t - tau)/(gamma + alpha tau).
double oracle_law(const LawParams& p, double t) {
  const double prefactor = std::pow(p.g_max, 4) / p.delta_typ;
  return 2.0 * prefactor * oracle::shorttime_kernel(p.mu_av / p.t1_thermal, p.gamma, t);
}

double bisect(const std::function<double(double)>& f, double lo, double hi) {
  for (int i = 0; i < 200; ++i) {
    const double mid = std::sqrt(lo * hi);
    (f(mid) > 0.0 ? hi : lo) = mid;
  }
  return std::sqrt(lo * hi);
}

}  // namespace

TEST(ShorttimeShape, UnitAtZeroAndDecreasing) {
  EXPECT_DOUBLE_EQ(shorttime_shape(0.0), 1.0);
  double prev = 1.0;
  for (double u : {1e-6, 1e-4, 9e-4, 1.1e-3, 0.01, 0.1, 1.0, 10.0, 1e3}) {
    const double s = shorttime_shape(u);
    EXPECT_LT(s, prev) << u;
    prev = s;
  }
  // Series and closed form agree across the switch point.
  EXPECT_NEAR(shorttime_shape(0.999e-3), shorttime_shape(1.001e-3), 1e-6);
}

TEST(ShorttimeShape, MatchesKernel) {
  const double gamma = 2.0;
  for (double alpha : {1e-3, 0.5, 3.0, 100.0}) {
    for (double t : {0.01, 0.5, 4.0}) {
      const double kernel = oracle::shorttime_kernel(alpha, gamma, t);
      EXPECT_NEAR(shorttime_shape(alpha * t / gamma), 2.0 * gamma * kernel / (t * t), 1e-9);
    }
  }
}

TEST(ResonanceSum, MatchesDirectSummation) {
  const QubitParams q{1000.0, 400.0, 80.0};
  const TlsParams tls{995.0, 0.5, 1.0, 30.0, 100.0};
  EXPECT_NEAR(resonance_sum(tls, q) / oracle_resonance_sum(30.0, 5.0, 5.0, 80.0), 1.0, 1e-12);
  const QubitParams plain{1000.0, 0.0, 0.0};
  EXPECT_NEAR(resonance_sum(tls, plain), 1.0 / (900.0 + 25.0), 1e-15);
}

TEST(Cumulant, ExactShorttimeMatchesKernel) {
  const QubitParams q{1000.0, 400.0, 80.0};
  const TlsParams tls{1003.0, 0.5, 1.0, 30.0, 100.0};
  const double t1t = 50.0;
  for (double t : {0.0, 0.01, 0.3, 2.0, 20.0, 50.0}) {
    const double ref = std::pow(0.5, 4) * 30.0 / 4.0 * oracle::shorttime_kernel(30.0 / t1t, 1.0, t) *
                       oracle_resonance_sum(30.0, -3.0, 5.0, 80.0);
    EXPECT_NEAR(cumulant_exact_shorttime(tls, q, t1t, t), ref, 1e-12 * std::max(ref, 1e-30)) << t;
  }
  EXPECT_THROW(cumulant_exact_shorttime(tls, q, t1t, 51.0), PreconditionError);
}

TEST(Cumulant, QuasistaticAndDynamicalLimits) {
  const QubitParams q{1000.0, 0.0, 0.0};
  const TlsParams tls{1000.0, 0.5, 1.0, 1e7, 1e8};
  const double t1t = 1e8;
  const double alpha = tls.mu_av / t1t;
  const double t_small = 1e-4 / alpha;
  EXPECT_NEAR(cumulant_exact_shorttime(tls, q, t1t, t_small) / cumulant_quasistatic(tls, q, t_small), 1.0, 1e-4);
  // For gamma/alpha << t << T1T the exact form is (t/alpha)(ln(alpha t/gamma) - 1) up to O(gamma/(alpha t)).
  for (double u : {1e4, 1e6}) {
    const double t = u / alpha;
    const double ratio = cumulant_exact_shorttime(tls, q, t1t, t) / cumulant_dynamical(tls, q, t1t, t);
    EXPECT_NEAR(ratio, 1.0 - 1.0 / std::log(u), 2e-3) << u;
  }
}

TEST(Correlator, ShortRegimeClosedForm) {
  const QubitParams q{1000.0, 0.0, 0.0};
  const TlsParams tls{1000.0, 0.4, 1.0, 20.0, 100.0};
  const double t1t = 10.0;
  const double g4 = std::pow(0.4, 4);
  const auto c0 = correlator_closed(tls, q, t1t, 3.0, 3.0, CorrelatorRegime::short_time);
  EXPECT_NEAR(c0.real(), g4 * 20.0 / 16.0 / 400.0, 1e-15);
  EXPECT_EQ(c0.imag(), 0.0);
  const auto c1 = correlator_closed(tls, q, t1t, 1.0, 3.5, CorrelatorRegime::short_time);
  const auto c2 = correlator_closed(tls, q, t1t, 3.5, 1.0, CorrelatorRegime::short_time);
  EXPECT_EQ(c1, c2);
  EXPECT_NEAR(c0.real() / c1.real(), (2.0 + 20.0 / t1t * 2.5) / 2.0, 1e-12);
  const TlsParams slow{1000.0, 0.4, 30.0, 20.0, 100.0};
  EXPECT_THROW(correlator_closed(slow, q, t1t, 0.0, 1.0, CorrelatorRegime::short_time), PreconditionError);
}

TEST(Correlator, LongRegimeClosedForm) {
  const QubitParams q{1000.0, 0.0, 0.0};
  const double delta = 3.0;
  const TlsParams tls{1000.0 - delta, 0.4, 1.0, 20.0, 100.0};
  const double t1t = 10.0;
  const std::complex<double> first = 1.0 / std::complex<double>(21.0, delta);
  const double g4_16 = std::pow(0.4, 4) / 16.0;
  const auto inside = correlator_closed(tls, q, t1t, 0.0, 4.0, CorrelatorRegime::long_time);
  const auto ref_inside = g4_16 * first / std::complex<double>(1.0 + 2.0 * 4.0, -delta);
  EXPECT_NEAR(std::abs(inside - ref_inside), 0.0, 1e-14);
  const auto beyond = correlator_closed(tls, q, t1t, 0.0, 40.0, CorrelatorRegime::long_time);
  EXPECT_NEAR(std::abs(beyond - g4_16 * std::norm(first)), 0.0, 1e-14);
  const auto mc = mean_c(tls, q, CorrelatorRegime::long_time);
  EXPECT_NEAR(std::abs(mc - 0.04 / std::complex<double>(21.0, -delta)), 0.0, 1e-15);
  const auto ms = mean_c(tls, q, CorrelatorRegime::short_time);
  EXPECT_NEAR(std::abs(ms - 0.04 / std::complex<double>(20.0, -delta)), 0.0, 1e-15);
}

TEST(DephasingLaw, ShortBranchMatchesKernel) {
  const LawParams p = reference_law();
  for (double t_us : {0.1, 1.0, 13.0, 100.0, 400.0, 1000.0}) {
    const double t = t_us * 1e-6;
    EXPECT_NEAR(dephasing_law(p, 0.0, t).neg2lnD / oracle_law(p, t), 1.0, 1e-10) << t_us;
  }
  EXPECT_EQ(dephasing_law(p, 0.0, 0.0).neg2lnD, 0.0);
}

TEST(DephasingLaw, BranchesAndContinuity) {
  const LawParams p = reference_law();
  const double tc = p.crossover_time();
  const double t1t = p.t1_thermal;
  EXPECT_NEAR(tc, 100e-6, 1e-18);
  EXPECT_EQ(dephasing_law(p, 0.0, 0.5 * tc).branch, 1);
  EXPECT_EQ(dephasing_law(p, 0.0, tc).branch, 1);
  EXPECT_EQ(dephasing_law(p, 0.0, 2.0 * tc).branch, 2);
  EXPECT_EQ(dephasing_law(p, 0.0, t1t).branch, 2);
  EXPECT_EQ(dephasing_law(p, 0.0, 1.5 * t1t).branch, 3);

  const double h = 1e-6 * t1t;
  const double left = dephasing_law(p, 0.0, t1t).neg2lnD;
  const double right = dephasing_law(p, 0.0, t1t + h).neg2lnD;
  EXPECT_NEAR(right / left, 1.0, 1e-5);
  const double left_slope = (left - dephasing_law(p, 0.0, t1t - h).neg2lnD) / h;
  const double right_slope = (right - left) / h;
  EXPECT_NEAR(right_slope / left_slope, 1.0, 1e-5);
  // d/dt of 2 P kernel is 2 P ln(1 + alpha t/gamma)/alpha.
  const double ref_slope = 2.0 * std::pow(p.g_max, 4) / p.delta_typ * std::log1p(p.mu_av / p.gamma) * t1t / p.mu_av;
  EXPECT_NEAR(right_slope / ref_slope, 1.0, 1e-5);

  double prev = 0.0;
  for (int k = 1; k < 200; ++k) {
    const double v = dephasing_law(p, 0.0, 1e-7 * std::pow(1.06, k)).neg2lnD;
    EXPECT_GT(v, prev);
    prev = v;
  }
}

TEST(DephasingLaw, Preconditions) {
  LawParams p = reference_law();
  EXPECT_THROW(dephasing_law(p, 0.0, -1.0), PreconditionError);
  p.mu_av = p.gamma;
  EXPECT_THROW(dephasing_law(p, 0.0, 1e-6), PreconditionError);
  p = reference_law();
  p.t1_thermal = std::numeric_limits<double>::infinity();
  EXPECT_THROW(dephasing_law(p, 0.0, 1e-6), PreconditionError);
}

TEST(DephasingLaw, ModulationScalesByS4) {
  const LawParams p = reference_law();
  for (double x : {1.0, 5.0, 10.0}) {
    const double ratio = dephasing_law(p, x, 3e-5).neg2lnD / dephasing_law(p, 0.0, 3e-5).neg2lnD;
    EXPECT_NEAR(ratio, oracle::s4_direct(x, static_cast<int>(x) + 40), 1e-12);
  }
}

TEST(EffectiveRate, InvertsTheLaw) {
  const LawParams p = reference_law();
  const double t_phi = bisect([&](double t) { return oracle_law(p, t) - 1.0; }, 1e-9, 1e-3);
  EXPECT_NEAR(effective_dephasing_rate(p, 0.0) * t_phi, 1.0, 1e-9);
  const double t5 = bisect([&](double t) { return oracle_law(p, t) - 5.0; }, 1e-9, 1e-3);
  EXPECT_NEAR(effective_dephasing_rate(p, 0.0, 5.0) * t5, 1.0, 1e-9);
}

TEST(EffectiveRate, ContinuousAcrossMuEqualsGamma) {
  LawParams p = reference_law();
  p.mu_av = p.gamma * (1.0 + 1e-9);
  const double above = effective_dephasing_rate(p, 0.0);
  p.mu_av = p.gamma * (1.0 - 1e-9);
  const double below = effective_dephasing_rate(p, 0.0);
  // The only mismatch is the shape factor at t_phi, here alpha t_phi / gamma ~ 0.016.
  EXPECT_NEAR(above / below, 1.0, 1e-2);
}

TEST(SmallDiffusionLaw, ClosedForm) {
  LawParams p = reference_law();
  p.gamma = units::from_mhz(5.0);
  p.mu_max = units::from_mhz(1.0);
  p.mu_av = units::from_mhz(0.5);
  const double t = 7e-6;
  const double g1 = p.g_max * p.g_max / p.delta_typ;
  const double ref = std::pow(g1 * t * p.mu_max / p.gamma, 2) * p.delta_typ / p.gamma;
  EXPECT_NEAR(small_diffusion_law(p, 0.0, t) / ref, 1.0, 1e-12);
  EXPECT_NEAR(small_diffusion_law(p, 2.0, t) / ref, oracle::s4_direct(2.0, 42), 1e-12);
  EXPECT_NEAR(effective_dephasing_rate(p, 0.0), std::sqrt(ref) / t, 1e-9 * std::sqrt(ref) / t);
  p.mu_max = 2.0 * p.gamma;
  EXPECT_THROW(small_diffusion_law(p, 0.0, t), PreconditionError);
}

TEST(Regime, ReferenceDiagnostics) {
  const LawParams p = reference_law();
  const RegimeReport r = crossover_diagnostics(p, 0.0);
  EXPECT_NEAR(r.t_crossover, 100e-6, 1e-15);
  EXPECT_NEAR(r.neg2lnD_at_crossover, 40.0, 1e-9);
  EXPECT_NEAR(r.markov_number, 100.0 * std::numbers::pi, 1e-9);
  EXPECT_TRUE(r.markov_ok);
  EXPECT_NEAR(r.gamma_1q, 5e4, 1e-6);
  EXPECT_EQ(r.classification, RegimeClass::quasi_static_dominant);
  EXPECT_STREQ(to_string(r.classification), "quasi-static-dominant");
  EXPECT_NEAR(r.gamma_phi, effective_dephasing_rate(p, 0.0), 0.0);
}

TEST(Regime, FastDiffusionIsDynamical) {
  LawParams p = reference_law();
  p.mu_av *= 100.0;
  p.mu_max *= 100.0;
  const RegimeReport r = crossover_diagnostics(p, 0.0);
  EXPECT_NEAR(r.neg2lnD_at_crossover, 40.0e-4, 1e-12);
  EXPECT_EQ(r.classification, RegimeClass::dynamical_subdominant);
  EXPECT_NEAR(r.markov_number, std::numbers::pi, 1e-12);
}

TEST(Regime, SmallDiffusionClass) {
  LawParams p = reference_law();
  p.mu_max = 0.5 * p.gamma;
  p.mu_av = 0.25 * p.gamma;
  EXPECT_EQ(crossover_diagnostics(p, 0.0).classification, RegimeClass::small_diffusion);
}

TEST(Regime, InvariantUnderRescalingRatesAndTimes) {
  const LawParams p = reference_law();
  const RegimeReport r = crossover_diagnostics(p, 0.0);
  for (double s : {1e-3, 7.0, 1e4}) {
    LawParams q = p;
    q.g_max *= s;
    q.delta_typ *= s;
    q.gamma *= s;
    q.mu_av *= s;
    q.mu_max *= s;
    q.t1_thermal /= s;
    const RegimeReport rs = crossover_diagnostics(q, 0.0);
    EXPECT_NEAR(rs.neg2lnD_at_crossover / r.neg2lnD_at_crossover, 1.0, 1e-12);
    EXPECT_NEAR(rs.markov_number / r.markov_number, 1.0, 1e-12);
    EXPECT_NEAR(rs.t_crossover * s / r.t_crossover, 1.0, 1e-12);
    EXPECT_NEAR(rs.gamma_phi / (s * r.gamma_phi), 1.0, 1e-9);
    EXPECT_EQ(rs.classification, r.classification);
  }
}

TEST(EnsembleResonance, DensityOfStatesEstimate) {
  // Sum over a Poisson ensemble: (1/delta) int p(g) g^4 dg int dDelta/(mu^2 + Delta^2)
  // = (2/15) g_max^4/delta * 2 atan(B/mu)/mu, i.e. (4/15) atan(B/mu) times the estimate.
  EnsembleSpec s;
  s.delta_typ = 0.05;
  s.g_max = 0.5;
  s.g_min = 1e-3;
  s.gamma = 1.0;
  s.mu_av = 2.0;
  s.mu_max = 10.0;
  s.band_halfwidth = 40.0;
  s.r_thermal = 1.0;
  const QubitParams q{1000.0, 0.0, 0.0};
  const LawParams p = LawParams::from(s);
  double acc = 0.0;
  const int builds = 400;
  for (int b = 0; b < builds; ++b) {
    RandomStream rng(11, static_cast<std::uint64_t>(b), 0);
    const auto ens = build_ensemble(s, q, rng);
    acc += ensemble_resonance_sum(ens, q);
  }
  const double expected = 4.0 / 15.0 * std::atan(s.band_halfwidth / s.mu_av) * ensemble_resonance_estimate(p, 0.0);
  EXPECT_NEAR(acc / builds / expected, 1.0, 0.03);
}

TEST(RelaxationCumulant, ComposesMeanAndFluctuation) {
  const QubitParams q{1000.0, 0.0, 0.0};
  const std::vector<TlsParams> ens{{1000.0, 0.2, 1.0, 20.0, 100.0}, {990.0, 0.3, 1.0, 20.0, 100.0}};
  const double t1t = 10.0;
  for (double t : {0.0, 0.1, 1.0, 10.0}) {
    double ref = 0.0;
    for (const auto& tls : ens) {
      ref -= mean_c(tls, q, CorrelatorRegime::long_time).real() * t;
      ref += 0.5 * cumulant_exact_shorttime(tls, q, t1t, t);
    }
    EXPECT_NEAR(relaxation_cumulant(ens, q, t1t, t), ref, 1e-15 + 1e-12 * std::abs(ref));
  }
  EXPECT_LT(relaxation_cumulant(ens, q, t1t, 0.1), 0.0);
  EXPECT_THROW(relaxation_cumulant(ens, q, t1t, 11.0), PreconditionError);
}

TEST(TemperatureMap, PowerLaws) {
  const TemperatureCalibration cal{2.0, 5.0};
  const ThermalState s = temperature_map(0.1, cal);
  EXPECT_DOUBLE_EQ(s.mu_av, 0.2);
  EXPECT_NEAR(s.t1_thermal, 1.0 / (5.0 * 1e-3), 1e-9);
  EXPECT_THROW(temperature_map(0.0, cal), PreconditionError);
  EXPECT_THROW(temperature_map(1.0, {0.0, 1.0}), PreconditionError);
}

TEST(TemperatureSweep, RowsFollowTheMap) {
  SweepSpec spec;
  spec.base = reference_law();
  spec.mu_max_ratio = 10.0;
  spec.cal = {units::from_mhz(5.0) / 0.05, 1.0 / (1e-3 * std::pow(0.05, 3))};
  spec.t_min = 0.005;
  spec.t_max = 0.5;
  spec.points = 21;
  const auto rows = temperature_sweep(spec);
  ASSERT_EQ(rows.size(), 21u);
  EXPECT_NEAR(rows.front().temperature, 0.005, 1e-15);
  EXPECT_NEAR(rows.back().temperature, 0.5, 1e-12);
  EXPECT_NEAR(rows[10].temperature, 0.05, 1e-12);
  for (const auto& row : rows) {
    const ThermalState st = temperature_map(row.temperature, spec.cal);
    EXPECT_DOUBLE_EQ(row.mu_av, st.mu_av);
    EXPECT_DOUBLE_EQ(row.t1_thermal, st.t1_thermal);
    LawParams p = spec.base;
    p.mu_av = st.mu_av;
    p.mu_max = 10.0 * st.mu_av;
    p.t1_thermal = st.t1_thermal;
    EXPECT_DOUBLE_EQ(row.gamma_phi, effective_dephasing_rate(p, 0.0));
    const double longtime = std::pow(p.g_max, 4) / p.delta_typ * p.t1_thermal / p.mu_av;
    EXPECT_NEAR(row.gamma_phi_long / longtime, 1.0, 1e-12);
  }
  // At the reference point the row reproduces the reference law.
  EXPECT_NEAR(rows[10].gamma_phi / effective_dephasing_rate(reference_law(), 0.0), 1.0, 1e-9);
  spec.points = 1;
  EXPECT_THROW(temperature_sweep(spec), PreconditionError);
}
