#include "dephasim/diffusion.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstring>
#include <limits>
#include <numbers>
#include <ostream>
#include <string>
#include <utility>

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/quadrature/ooura_fourier_integrals.hpp>
#include <boost/math/tools/roots.hpp>

#include "dephasim/errors.hpp"
#include "dephasim/units.hpp"

namespace dephasim {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kMaxFlipsPerStep = 1.0e3;

void require(bool ok, const std::string& what) {
  if (!ok) throw PreconditionError(what);
}

// CDF of A given A + B = z for independent A ~ Cauchy(a), B ~ Cauchy(b).
// The conditional density is proportional to 1/((A^2 + a^2)((A - z)^2 + b^2)); its partial-fraction
// antiderivative is z ln(P/Q) + c1 atan(A/a) + c2 atan((A - z)/b) with c1 + c2 > 0.
struct CauchySplit {
  double z, a, b, w1, w2, zl;

  CauchySplit(double z_, double a_, double b_) : z(z_), a(a_), b(b_) {
    const double c1 = (z * z + b * b - a * a) / a;
    const double c2 = (z * z + a * a - b * b) / b;
    const double total = (a + b) * (z * z + (b - a) * (b - a)) / (a * b);
    w1 = c1 / total;
    w2 = c2 / total;
    zl = z / total;
  }

  double cdf(double A) const {
    const double p = A * A + a * a;
    const double d = A - z;
    const double q = d * d + b * b;
    const double value =
        zl * std::log(p / q) + w1 * (std::atan(A / a) + 0.5 * kPi) + w2 * (std::atan(d / b) + 0.5 * kPi);
    return value / kPi;
  }
};

double sample_split(double z, double a, double b, RandomStream& rng) {
  const CauchySplit split(z, a, b);
  const double u = rng.uniform();
  const double scale = a + b;
  auto f = [&](double theta) { return split.cdf(scale * std::tan(theta)) - u; };
  double lo = -0.5 * kPi;
  double hi = 0.5 * kPi;
  const double f_lo = f(lo);
  const double f_hi = f(hi);
  if (f_lo >= 0.0) return scale * std::tan(lo);
  if (f_hi <= 0.0) return scale * std::tan(hi);
  std::uintmax_t iterations = 200;
  const auto [r_lo, r_hi] = boost::math::tools::toms748_solve(
      f, lo, hi, f_lo, f_hi, boost::math::tools::eps_tolerance<double>(50), iterations);
  if (iterations >= 200) throw NumericError("ka_step: conditional Cauchy inversion did not converge");
  return scale * std::tan(0.5 * (r_lo + r_hi));
}

double inner_lower_limit(double k) { return std::min(-20.0, -0.5 * std::log(k) - 20.0); }

// int_0^1 (1 - exp(-k x^2)) / x dx in s = ln x.
double width_inner(double k) {
  if (k <= 0.0) return 0.0;
  auto f = [k](double s) { return -std::expm1(-k * std::exp(2.0 * s)); };
  double err = 0.0;
  const double lo = inner_lower_limit(k);
  const double v = boost::math::quadrature::gauss_kronrod<double, 61>::integrate(f, lo, 0.0, 15, 1e-10, &err);
  if (!std::isfinite(v) || err > 1e-7 * std::max(v, 1e-300)) {
    throw NumericError("width_function: inner quadrature did not converge");
  }
  return v;
}

}  // namespace

void ThermalBathParams::validate() const {
  require(kappa >= 0.0, "bath: kappa must be non-negative");
  require(mu_av >= 0.0, "bath: mu_av must be non-negative");
  require(mu_max > 0.0, "bath: mu_max must be positive");
  require(mu_av <= mu_max, "bath: mu_av must not exceed mu_max");
  require(n_fluctuators >= 8, "bath: n_fluctuators must be at least 8");
}

ThermalBathParams bath_for(const TlsParams& tls, double kappa, int n_fluctuators) {
  return {kappa, tls.mu_av, tls.mu_max, n_fluctuators};
}

double ShiftPath::y_at(double t) const {
  const auto it = std::upper_bound(jump_times.begin(), jump_times.end(), t);
  if (it == jump_times.begin()) return 0.0;
  return values[static_cast<std::size_t>(it - jump_times.begin()) - 1];
}

ShiftTrajectory ShiftPath::sample(std::span<const double> grid) const {
  ShiftTrajectory traj;
  traj.times.assign(grid.begin(), grid.end());
  traj.x = x;
  traj.y.reserve(grid.size());
  for (double t : grid) traj.y.push_back(y_at(t));
  return traj;
}

double sample_static_shift(const ThermalBathParams& bath, RandomStream& rng) {
  if (bath.mu_av <= 0.0) return 0.0;
  const double theta_max = std::atan(bath.mu_max / bath.mu_av);
  const double x = bath.mu_av * std::tan(theta_max * (2.0 * rng.uniform() - 1.0));
  return std::clamp(x, -bath.mu_max, bath.mu_max);
}

double truncated_lorentzian_cdf(double x, double mu_av, double mu_max) {
  if (x <= -mu_max) return 0.0;
  if (x >= mu_max) return 1.0;
  if (mu_av <= 0.0) return x < 0.0 ? 0.0 : 1.0;
  const double theta_max = std::atan(mu_max / mu_av);
  return 0.5 * (1.0 + std::atan(x / mu_av) / theta_max);
}

void telegraph_path(const ThermalBathParams& bath, double t_end, RandomStream& rng, ShiftPath& out) {
  bath.validate();
  out.clear();
  if (bath.mu_av <= 0.0) return;
  const double v = bath.mu_max;
  const double u_out = 1.0 + bath.n_fluctuators * kPi * bath.mu_max / (2.0 * bath.mu_av);
  const double flip_rate = 0.5 * bath.kappa;

  thread_local std::vector<std::pair<double, double>> events;
  events.clear();
  double x = 0.0;
  for (int i = 0; i < bath.n_fluctuators; ++i) {
    const double c = v / (1.0 + (u_out - 1.0) * rng.uniform());
    double s = rng.coin() ? 1.0 : -1.0;
    x += s * c;
    if (flip_rate <= 0.0) continue;
    for (double t = rng.exponential() / flip_rate; t < t_end; t += rng.exponential() / flip_rate) {
      events.emplace_back(t, -2.0 * s * c);
      s = -s;
    }
  }
  std::sort(events.begin(), events.end());
  out.x = x;
  out.jump_times.reserve(events.size());
  out.values.reserve(events.size());
  double y = 0.0;
  for (const auto& [t, delta] : events) {
    y += delta;
    out.jump_times.push_back(t);
    out.values.push_back(y);
  }
}

ShiftTrajectory telegraph_realization(const ThermalBathParams& bath, std::span<const double> grid,
                                      RandomStream& rng) {
  require(!grid.empty() && grid.front() == 0.0, "telegraph_realization: grid must start at 0");
  double max_step = 0.0;
  for (std::size_t k = 1; k < grid.size(); ++k) {
    require(grid[k] > grid[k - 1], "telegraph_realization: grid must be strictly increasing");
    max_step = std::max(max_step, grid[k] - grid[k - 1]);
  }
  if (0.5 * bath.kappa * bath.n_fluctuators * max_step > kMaxFlipsPerStep) {
    throw NumericError("telegraph_realization: more than 1e3 expected flips per grid step");
  }
  ShiftPath path;
  telegraph_path(bath, grid.back(), rng, path);
  return path.sample(grid);
}

double ka_step(double x, double y, double dt, const ThermalBathParams& bath, RandomStream& rng) {
  require(dt > 0.0, "ka_step: dt must be positive");
  const double m = bath.m_rate();
  if (m <= 0.0) return y;
  require(dt <= 0.1 / (m * bath.rho()), "ka_step: dt exceeds the Lorentzian-increment validity 0.1/(m rho)");
  const double p = -0.5 * std::expm1(-bath.kappa * dt);
  const double a = p * bath.mu_av;
  const double b = (1.0 - p) * bath.mu_av;
  if (a <= 0.0) return y;
  const double reversed = sample_split(x + y, a, b, rng);
  return y - 2.0 * reversed;
}

void ka_path(const ThermalBathParams& bath, double t_end, double dt, RandomStream& rng, ShiftPath& out) {
  bath.validate();
  require(dt > 0.0, "ka_path: dt must be positive");
  out.clear();
  out.x = sample_static_shift(bath, rng);
  if (bath.m_rate() <= 0.0) return;
  double y = 0.0;
  for (std::size_t k = 1;; ++k) {
    const double t_jump = (static_cast<double>(k) - 0.5) * dt;
    if (t_jump >= t_end) break;
    y = ka_step(out.x, y, dt, bath, rng);
    out.jump_times.push_back(t_jump);
    out.values.push_back(y);
  }
}

ShiftTrajectory ka_realization(const ThermalBathParams& bath, std::span<const double> grid, double dt,
                               RandomStream& rng) {
  require(!grid.empty() && grid.front() == 0.0, "ka_realization: grid must start at 0");
  ShiftPath path;
  ka_path(bath, grid.back(), dt, rng, path);
  return path.sample(grid);
}

const char* to_string(EngineKind kind) { return kind == EngineKind::telegraph ? "telegraph" : "ka"; }

EngineKind engine_from_string(const char* name) {
  if (std::strcmp(name, "telegraph") == 0) return EngineKind::telegraph;
  if (std::strcmp(name, "ka") == 0) return EngineKind::ka;
  throw ConfigError(std::string("unknown diffusion engine '") + name + "'");
}

void DiffusionEngine::realize(const TlsParams& tls, double t_end, RandomStream& rng, ShiftPath& out) const {
  const ThermalBathParams b = bath(tls);
  if (kind == EngineKind::telegraph) {
    telegraph_path(b, t_end, rng, out);
  } else {
    ka_path(b, t_end, ka_dt, rng, out);
  }
}

double width_function(double t, const WidthParams& wp) {
  require(t >= 0.0, "width_function: t must be non-negative");
  require(wp.t1_min > 0.0, "width_function: t1_min must be positive");
  if (t == 0.0 || wp.mu_av == 0.0) return 0.0;
  const double tau = t / wp.t1_min;
  // Outer variable w = ln y.
  auto outer = [tau](double w) {
    const double y = std::exp(w);
    const double rate = y * y * (y / std::tanh(y));
    const double c = std::cosh(y);
    return width_inner(tau * rate) * y / (c * c);
  };
  double err = 0.0;
  const double value = boost::math::quadrature::gauss_kronrod<double, 61>::integrate(
      outer, -30.0, std::log(40.0), 20, 1e-9, &err);
  if (!std::isfinite(value) || err > 1e-6 * value) {
    throw NumericError("width_function: outer quadrature did not converge");
  }
  constexpr double kNorm = 128.0 / (kPi * kPi * kPi * kPi);
  return kNorm * wp.mu_av * value;
}

double propagator_density(double y, double t, const ThermalBathParams& bath) {
  require(t > 0.0 && bath.kappa > 0.0 && bath.mu_av > 0.0, "propagator_density: needs t, kappa, mu_av > 0");
  require(bath.kappa * t <= 0.1, "propagator_density: short-time regime requires kappa t <= 0.1");
  const double w = bath.m_rate() * t;
  return w / (kPi * (w * w + y * y));
}

double propagator_cdf(double y, double t, const ThermalBathParams& bath) {
  require(t > 0.0 && bath.kappa > 0.0 && bath.mu_av > 0.0, "propagator_cdf: needs t, kappa, mu_av > 0");
  require(bath.kappa * t <= 0.1, "propagator_cdf: short-time regime requires kappa t <= 0.1");
  return 0.5 + std::atan(y / (bath.m_rate() * t)) / kPi;
}

double stationary_density(double x, const ThermalBathParams& bath) {
  bath.validate();
  require(bath.mu_av > 0.0, "stationary_density: mu_av must be positive");
  // s = mu_av tau; the kernel decays like e^{-s}.
  const double r = bath.mu_av / bath.mu_max;
  auto kernel = [r](double s) { return std::exp(-(std::hypot(s, r) - r)); };
  const double omega = std::abs(x) / bath.mu_av;
  double integral = 0.0;
  if (omega == 0.0) {
    double err = 0.0;
    integral = boost::math::quadrature::gauss_kronrod<double, 61>::integrate(
        kernel, 0.0, std::numeric_limits<double>::infinity(), 15, 1e-10, &err);
  } else {
    thread_local boost::math::quadrature::ooura_fourier_cos<double> ooura(1e-10, 8);
    integral = ooura.integrate(kernel, omega).first;
  }
  if (!std::isfinite(integral)) throw NumericError("stationary_density: quadrature failed");
  return integral / (kPi * bath.mu_av);
}

void write_trajectory_csv(std::ostream& os, const ShiftTrajectory& traj) {
  os << "t_us,x_MHz,y_MHz\n";
  char line[128];
  for (std::size_t k = 0; k < traj.times.size(); ++k) {
    std::snprintf(line, sizeof line, "%.17g,%.17g,%.17g\n", units::to_us(traj.times[k]),
                  units::to_mhz(traj.x), units::to_mhz(traj.y[k]));
    os << line;
  }
}

}  // namespace dephasim
