#include <algorithm>
#include <cmath>
#include <vector>

#include <gtest/gtest.h>

#include <boost/math/distributions/chi_squared.hpp>

#include "dephasim/ensemble.hpp"
#include "dephasim/errors.hpp"
#include "dephasim/stats.hpp"
#include "dephasim/units.hpp"
#include "oracles.hpp"

using namespace dephasim;

namespace {

EnsembleSpec unit_spec() {
  EnsembleSpec s;
  s.delta_typ = 1.0;
  s.g_max = 1.0;
  s.g_min = 1e-3;
  s.band_halfwidth = 10.0;
  s.gamma = 1.0;
  s.mu_av = 0.5;
  s.mu_max = 5.0;
  s.r_thermal = 1.0;
  return s;
}

EnsembleSpec reference_spec() {
  EnsembleSpec s;
  s.delta_typ = units::from_mhz(0.8);
  s.g_max = std::sqrt(s.delta_typ / 20e-6);
  s.g_min = 1e-3 * s.g_max;
  s.gamma = units::from_mhz(0.5);
  s.mu_av = units::from_mhz(5.0);
  s.mu_max = units::from_mhz(50.0);
  s.band_halfwidth = s.mu_max;
  s.r_thermal = 1e3;
  return s;
}

QubitParams qubit() { return {units::from_mhz(5000.0), 0.0, 0.0}; }

// Normalized coupling CDF from the closed-form count integral.
double coupling_cdf(double g, const EnsembleSpec& s) {
  if (g <= s.g_min) return 0.0;
  if (g >= s.g_max) return 1.0;
  const double total = oracle::coupling_integral(s.g_min, s.g_max);
  return (total - oracle::coupling_integral(g, s.g_max)) / total;
}

}  // namespace

TEST(EnsembleSpec, ValidateRejectsBrokenInvariants) {
  EXPECT_NO_THROW(unit_spec().validate());
  auto s = unit_spec();
  s.g_min = 2.0;
  EXPECT_THROW(s.validate(), ConfigError);
  s = unit_spec();
  s.g_max = 2.0;  // above gamma
  EXPECT_THROW(s.validate(), ConfigError);
  s = unit_spec();
  s.mu_av = 6.0;  // above mu_max
  EXPECT_THROW(s.validate(), ConfigError);
  s = unit_spec();
  s.delta_typ = 0.0;
  EXPECT_THROW(s.validate(), ConfigError);
}

TEST(QubitParams, ValidateRequiresModulationFrequency) {
  QubitParams q{1.0, 0.5, 0.0};
  EXPECT_THROW(q.validate(), ConfigError);
  q.omega_mod = 1.0;
  EXPECT_NO_THROW(q.validate());
  EXPECT_DOUBLE_EQ(q.modulation_ratio(), 0.5);
  EXPECT_THROW((QubitParams{0.0, 0.0, 0.0}).validate(), ConfigError);
}

TEST(SampleCoupling, SamplesStayInRangeAndPassChiSquare) {
  const auto spec = unit_spec();
  RandomStream rng(1, 0, 0);
  const int n = 100000;
  const int bins = 30;
  std::vector<int> counts(bins, 0);
  const double log_lo = std::log(spec.g_min);
  const double log_span = -log_lo;
  for (int i = 0; i < n; ++i) {
    const double g = sample_coupling(spec, rng);
    ASSERT_GE(g, spec.g_min);
    ASSERT_LE(g, spec.g_max);
    const int b = std::min(bins - 1, static_cast<int>((std::log(g) - log_lo) / log_span * bins));
    ++counts[b];
  }
  double chi2 = 0.0;
  for (int b = 0; b < bins; ++b) {
    const double lo = std::exp(log_lo + log_span * b / bins);
    const double hi = std::exp(log_lo + log_span * (b + 1) / bins);
    const double expected = n * (coupling_cdf(hi, spec) - coupling_cdf(lo, spec));
    chi2 += (counts[b] - expected) * (counts[b] - expected) / expected;
  }
  const boost::math::chi_squared dist(bins - 1);
  EXPECT_GT(boost::math::cdf(boost::math::complement(dist, chi2)), 0.01);
}

TEST(SampleCoupling, KolmogorovDistanceSmallAtOneMillionSamples) {
  const auto spec = unit_spec();
  RandomStream rng(2, 0, 0);
  std::vector<double> g(1000000);
  for (auto& v : g) v = sample_coupling(spec, rng);
  EXPECT_LT(ks_distance(g, [&](double x) { return coupling_cdf(x, spec); }), 0.01);
}

TEST(SampleCoupling, FourthMomentMatchesClosedForm) {
  const auto spec = unit_spec();
  RandomStream rng(3, 0, 0);
  const int n = 1000000;
  double sum = 0.0;
  for (int i = 0; i < n; ++i) sum += std::pow(sample_coupling(spec, rng), 4);
  // int g^3 sqrt(1 - g^2) dg over [g_min, 1] is 2/15 up to O(g_min^4).
  const double expected = (2.0 / 15.0) / oracle::coupling_integral(spec.g_min, spec.g_max);
  EXPECT_NEAR(sum / n / expected, 1.0, 0.01);
}

TEST(CouplingCountIntegral, MatchesClosedForm) {
  auto spec = unit_spec();
  for (double r : {1e-1, 1e-3, 1e-6}) {
    spec.g_min = r;
    EXPECT_NEAR(coupling_count_integral(spec), oracle::coupling_integral(r, 1.0), 1e-10);
  }
}

TEST(BuildEnsemble, CountIsPoissonWithQuadratureMean) {
  const auto spec = reference_spec();
  const double mean = expected_tls_count(spec);
  EXPECT_NEAR(mean, 2.0 * spec.band_halfwidth / spec.delta_typ * oracle::coupling_integral(spec.g_min, spec.g_max),
              1e-9 * mean);
  const int builds = 4000;
  double sum = 0.0;
  double sum2 = 0.0;
  for (int b = 0; b < builds; ++b) {
    RandomStream rng(4, static_cast<std::uint64_t>(b), 0);
    const double c = static_cast<double>(build_ensemble(spec, qubit(), rng).size());
    sum += c;
    sum2 += c * c;
  }
  const double m = sum / builds;
  const double var = (sum2 - builds * m * m) / (builds - 1);
  EXPECT_NEAR(m, mean, 4.0 * std::sqrt(mean / builds));
  EXPECT_GT(var / m, 0.9);
  EXPECT_LT(var / m, 1.1);
}

TEST(BuildEnsemble, SplittingsInsideBandAndTypicalValuesCopied) {
  const auto spec = reference_spec();
  const auto q = qubit();
  RandomStream rng(5, 0, 0);
  const auto ens = build_ensemble(spec, q, rng);
  ASSERT_FALSE(ens.empty());
  for (const auto& t : ens) {
    EXPECT_LE(std::abs(t.eps0 - q.e0), spec.band_halfwidth);
    EXPECT_GE(t.g, spec.g_min);
    EXPECT_LE(t.g, spec.g_max);
    EXPECT_EQ(t.gamma, spec.gamma);
    EXPECT_EQ(t.mu_av, spec.mu_av);
    EXPECT_EQ(t.mu_max, spec.mu_max);
    EXPECT_DOUBLE_EQ(t.detuning(q), q.e0 - t.eps0);
  }
}

TEST(BuildEnsemble, NarrowBandRejectedAndVanishingBandEmpty) {
  auto spec = reference_spec();
  spec.band_halfwidth = 0.5 * spec.mu_max;
  RandomStream rng(6, 0, 0);
  EXPECT_THROW(build_ensemble(spec, qubit(), rng), ConfigError);
  spec.mu_av = 0.0;
  spec.mu_max = 1e-9;
  spec.band_halfwidth = 1e-9;
  EXPECT_TRUE(build_ensemble(spec, qubit(), rng).empty());
}

TEST(GoldenRuleRate, InvertsToReferenceCoupling) {
  const auto spec = reference_spec();
  EXPECT_NEAR(golden_rule_rate(spec), 1.0 / 20e-6, 1e-6);
  EXPECT_NEAR(units::to_mhz(spec.g_max), 0.0798, 0.001);
  auto doubled = spec;
  doubled.g_max *= 2.0;
  EXPECT_DOUBLE_EQ(golden_rule_rate(doubled), 4.0 * golden_rule_rate(spec));
  doubled.delta_typ *= 2.0;
  EXPECT_DOUBLE_EQ(golden_rule_rate(doubled), 2.0 * golden_rule_rate(spec));
}
