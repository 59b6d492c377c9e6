#include <algorithm>
#include <cmath>
#include <numbers>
#include <vector>

#include <gtest/gtest.h>

#include "dephasim/random.hpp"
#include "dephasim/stats.hpp"

using namespace dephasim;

namespace {

// Dual theta series Q(lambda) = 1 - sqrt(2 pi)/lambda sum_k exp(-(2k-1)^2 pi^2 / (8 lambda^2)).
double kolmogorov_dual(double lambda) {
  double s = 0.0;
  for (int k = 1; k < 50; ++k) {
    const double j = 2.0 * k - 1.0;
    s += std::exp(-j * j * std::numbers::pi * std::numbers::pi / (8.0 * lambda * lambda));
  }
  return 1.0 - std::sqrt(2.0 * std::numbers::pi) / lambda * s;
}

double uniform_cdf(double x) { return std::clamp(x, 0.0, 1.0); }

}  // namespace

TEST(Kolmogorov, MatchesDualSeries) {
  for (double lambda : {0.3, 0.5, 0.8, 1.0, 1.36, 2.0, 3.0}) {
    EXPECT_NEAR(kolmogorov_survival(lambda), kolmogorov_dual(lambda), 1e-12) << lambda;
  }
  EXPECT_DOUBLE_EQ(kolmogorov_survival(0.0), 1.0);
  EXPECT_NEAR(kolmogorov_survival(1.36), 0.0494, 2e-4);
}

TEST(KsDistance, HandComputedExample) {
  const std::vector<double> s{0.8, 0.2, 0.6, 0.4};
  EXPECT_NEAR(ks_distance(s, uniform_cdf), 0.2, 1e-15);
  // The global maximum 0.25 sits at 0.5; inside [0.6, 1] the largest gap is 0.2.
  const std::vector<double> w{0.95, 0.05, 0.7, 0.5};
  EXPECT_NEAR(ks_distance(w, uniform_cdf), 0.25, 1e-15);
  EXPECT_NEAR(ks_distance(w, uniform_cdf, 0.6, 1.0), 0.2, 1e-15);
}

TEST(KsTest, UniformSamplesAccepted) {
  RandomStream rng(3, 0, 0);
  std::vector<double> s(20000);
  for (auto& v : s) v = rng.uniform();
  const KsResult r = ks_test(s, uniform_cdf);
  EXPECT_GT(r.p_value, 1e-3);
  std::vector<double> skewed(s);
  for (auto& v : skewed) v = v * v;
  EXPECT_LT(ks_test(skewed, uniform_cdf).p_value, 1e-6);
}

TEST(KsTwoSample, IdenticalAndDisjoint) {
  const std::vector<double> a{1.0, 2.0, 3.0, 4.0};
  EXPECT_EQ(ks_two_sample(a, a).distance, 0.0);
  EXPECT_DOUBLE_EQ(ks_two_sample(a, a).p_value, 1.0);
  const std::vector<double> b{5.0, 6.0, 7.0};
  EXPECT_DOUBLE_EQ(ks_two_sample(a, b).distance, 1.0);
  const std::vector<double> c{1.5, 2.5, 3.5, 4.5};
  EXPECT_DOUBLE_EQ(ks_two_sample(a, c).distance, 0.25);
}

TEST(KsTwoSample, SameDistributionAccepted) {
  RandomStream r1(5, 0, 0), r2(5, 1, 0);
  std::vector<double> a(5000), b(7000);
  for (auto& v : a) v = r1.cauchy();
  for (auto& v : b) v = r2.cauchy();
  EXPECT_GT(ks_two_sample(a, b).p_value, 1e-3);
  for (auto& v : b) v += 0.3;
  EXPECT_LT(ks_two_sample(a, b).p_value, 1e-6);
}

TEST(PairwiseSum, AccurateAndOrderFixed) {
  std::vector<double> v(1 << 20, 0.1);
  const double naive_target = 0.1 * static_cast<double>(v.size());
  EXPECT_NEAR(pairwise_sum(v), naive_target, 1e-9);
  std::vector<long double> lv(1000);
  long double ref = 0.0L;
  for (std::size_t i = 0; i < lv.size(); ++i) {
    lv[i] = 1.0L / static_cast<long double>(i + 1);
    ref += lv[i];
  }
  EXPECT_NEAR(static_cast<double>(pairwise_sum(std::span<const long double>(lv))), static_cast<double>(ref), 1e-15);
  EXPECT_EQ(pairwise_sum(std::span<const double>()), 0.0);
  const std::vector<double> one{2.5};
  EXPECT_EQ(pairwise_sum(one), 2.5);
}
