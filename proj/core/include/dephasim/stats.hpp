#pragma once

#include <functional>
#include <limits>
#include <span>
#include <vector>

namespace dephasim {

struct KsResult {
  double distance = 0.0;
  double p_value = 1.0;
};

// sup |F_n(x) - F(x)| over sample points inside [lo, hi]; the empirical CDF uses every sample.
double ks_distance(std::span<const double> samples, const std::function<double(double)>& cdf,
                   double lo = -std::numeric_limits<double>::infinity(),
                   double hi = std::numeric_limits<double>::infinity());

// One-sample KS distance with its asymptotic p-value.
KsResult ks_test(std::span<const double> samples, const std::function<double(double)>& cdf);

// Two-sample KS distance and asymptotic p-value.
KsResult ks_two_sample(std::span<const double> a, std::span<const double> b);

// Q_KS(lambda) = 2 sum_{k>=1} (-1)^{k-1} exp(-2 k^2 lambda^2).
double kolmogorov_survival(double lambda);

// Sum in a fixed binary-tree order, independent of how the input was produced.
double pairwise_sum(std::span<const double> v);
long double pairwise_sum(std::span<const long double> v);

}  // namespace dephasim
