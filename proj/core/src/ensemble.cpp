#include "dephasim/ensemble.hpp"

#include <cmath>
#include <limits>
#include <random>
#include <string>

#include <boost/math/quadrature/tanh_sinh.hpp>

#include "dephasim/errors.hpp"

namespace dephasim {

namespace {

constexpr int kRejectionCap = 1'000'000;

void require(bool ok, const std::string& what) {
  if (!ok) throw ConfigError(what);
}

}  // namespace

void QubitParams::validate() const {
  require(e0 > 0.0, "qubit: e0 must be positive");
  require(a_mod >= 0.0, "qubit: a_mod must be non-negative");
  require(a_mod == 0.0 || omega_mod > 0.0, "qubit: omega_mod must be positive when a_mod > 0");
}

double EnsembleSpec::t1_thermal() const {
  return r_thermal > 0.0 ? 1.0 / r_thermal : std::numeric_limits<double>::infinity();
}

void EnsembleSpec::validate() const {
  require(delta_typ > 0.0, "ensemble: delta_typ must be positive");
  require(g_min > 0.0, "ensemble: g_min must be positive");
  require(g_min < g_max, "ensemble: g_min must be below g_max");
  require(gamma > 0.0, "ensemble: gamma must be positive");
  require(g_max <= gamma, "ensemble: weak coupling requires g_max <= gamma");
  require(mu_av >= 0.0, "ensemble: mu_av must be non-negative");
  require(mu_av <= mu_max, "ensemble: mu_av must not exceed mu_max");
  require(band_halfwidth >= 0.0, "ensemble: band_halfwidth must be non-negative");
  require(r_thermal >= 0.0, "ensemble: r_thermal must be non-negative");
}

double sample_coupling(const EnsembleSpec& spec, RandomStream& rng) {
  const double log_lo = std::log(spec.g_min);
  const double log_span = std::log(spec.g_max) - log_lo;
  for (int i = 0; i < kRejectionCap; ++i) {
    const double g = std::exp(log_lo + log_span * rng.uniform());
    const double s = g / spec.g_max;
    if (rng.uniform() < std::sqrt(std::max(0.0, 1.0 - s * s))) return std::min(g, spec.g_max);
  }
  throw NumericError("sample_coupling: rejection loop exceeded iteration cap");
}

double coupling_count_integral(const EnsembleSpec& spec) {
  // In u = ln(g / g_max) the integrand is sqrt(1 - e^{2u}); endpoint singularity handled by tanh-sinh.
  const double u_lo = std::log(spec.g_min / spec.g_max);
  boost::math::quadrature::tanh_sinh<double> integrator;
  double err = 0.0;
  const double value = integrator.integrate(
      [](double u) { return std::sqrt(std::max(0.0, -std::expm1(2.0 * u))); }, u_lo, 0.0,
      1e-12, &err);
  if (!std::isfinite(value)) throw NumericError("coupling_count_integral: quadrature failed");
  return value;
}

double expected_tls_count(const EnsembleSpec& spec) {
  return 2.0 * spec.band_halfwidth / spec.delta_typ * coupling_count_integral(spec);
}

std::vector<TlsParams> build_ensemble(const EnsembleSpec& spec, const QubitParams& qubit,
                                      RandomStream& rng) {
  spec.validate();
  if (spec.band_halfwidth < spec.mu_max) {
    throw ConfigError("ensemble: band_halfwidth must be at least mu_max");
  }
  const double mean = expected_tls_count(spec);
  std::vector<TlsParams> out;
  if (mean <= 0.0) return out;
  std::poisson_distribution<long> count_dist(mean);
  const long count = count_dist(rng);
  out.reserve(static_cast<std::size_t>(count));
  for (long i = 0; i < count; ++i) {
    TlsParams tls;
    tls.eps0 = qubit.e0 + spec.band_halfwidth * (2.0 * rng.uniform() - 1.0);
    tls.g = sample_coupling(spec, rng);
    tls.gamma = spec.gamma;
    tls.mu_av = spec.mu_av;
    tls.mu_max = spec.mu_max;
    out.push_back(tls);
  }
  return out;
}

double golden_rule_rate(const EnsembleSpec& spec) { return spec.g_max * spec.g_max / spec.delta_typ; }

}  // namespace dephasim
