#include "dephasim/stats.hpp"

#include <algorithm>
#include <cmath>

namespace dephasim {

namespace {

template <class T>
T pairwise(std::span<const T> v) {
  if (v.size() <= 8) {
    T s = 0;
    for (const T& x : v) s += x;
    return s;
  }
  const std::size_t half = v.size() / 2;
  return pairwise(v.subspan(0, half)) + pairwise(v.subspan(half));
}

double ks_p_value(double distance, double effective_n) {
  const double en = std::sqrt(effective_n);
  return kolmogorov_survival((en + 0.12 + 0.11 / en) * distance);
}

}  // namespace

double ks_distance(std::span<const double> samples, const std::function<double(double)>& cdf, double lo,
                   double hi) {
  std::vector<double> s(samples.begin(), samples.end());
  std::sort(s.begin(), s.end());
  const double n = static_cast<double>(s.size());
  double d = 0.0;
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (s[i] < lo || s[i] > hi) continue;
    const double f = cdf(s[i]);
    d = std::max({d, std::abs(static_cast<double>(i + 1) / n - f), std::abs(f - static_cast<double>(i) / n)});
  }
  return d;
}

KsResult ks_test(std::span<const double> samples, const std::function<double(double)>& cdf) {
  const double d = ks_distance(samples, cdf);
  return {d, ks_p_value(d, static_cast<double>(samples.size()))};
}

KsResult ks_two_sample(std::span<const double> a, std::span<const double> b) {
  std::vector<double> x(a.begin(), a.end());
  std::vector<double> y(b.begin(), b.end());
  std::sort(x.begin(), x.end());
  std::sort(y.begin(), y.end());
  const double na = static_cast<double>(x.size());
  const double nb = static_cast<double>(y.size());
  std::size_t i = 0;
  std::size_t j = 0;
  double d = 0.0;
  while (i < x.size() && j < y.size()) {
    const double v = std::min(x[i], y[j]);
    while (i < x.size() && x[i] <= v) ++i;
    while (j < y.size() && y[j] <= v) ++j;
    d = std::max(d, std::abs(static_cast<double>(i) / na - static_cast<double>(j) / nb));
  }
  return {d, ks_p_value(d, na * nb / (na + nb))};
}

double kolmogorov_survival(double lambda) {
  if (lambda < 0.2) return 1.0;
  double sum = 0.0;
  double sign = 1.0;
  for (int k = 1; k <= 100; ++k) {
    const double term = sign * std::exp(-2.0 * k * k * lambda * lambda);
    sum += term;
    if (std::abs(term) < 1e-16 * std::abs(sum)) break;
    sign = -sign;
  }
  return std::clamp(2.0 * sum, 0.0, 1.0);
}

double pairwise_sum(std::span<const double> v) { return pairwise(v); }
long double pairwise_sum(std::span<const long double> v) { return pairwise(v); }

}  // namespace dephasim
