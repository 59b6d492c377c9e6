#pragma once

#include <iosfwd>
#include <span>
#include <vector>

#include "dephasim/ensemble.hpp"
#include "dephasim/random.hpp"

namespace dephasim {

// Thermal-TLS bath seen by one quantum TLS.
struct ThermalBathParams {
  double kappa = 0.0;      // switching rate 1/T1T, 1/s
  double mu_av = 0.0;      // rad/s
  double mu_max = 0.0;     // rad/s
  int n_fluctuators = 64;  // telegraph engine only

  double rho() const { return 1.0 / mu_max; }
  double m_rate() const { return mu_av * kappa; }
  // Throws PreconditionError unless kappa >= 0, 0 <= mu_av <= mu_max, mu_max > 0, n_fluctuators >= 8.
  void validate() const;
};

ThermalBathParams bath_for(const TlsParams& tls, double kappa, int n_fluctuators);

// Spectral shift sampled on a grid; y.front() == 0.
struct ShiftTrajectory {
  std::vector<double> times;
  double x = 0.0;
  std::vector<double> y;
};

// Piecewise-constant shift: y(t) = 0 before jump_times[0], values[k] on [jump_times[k], jump_times[k+1]).
// jump_times is non-decreasing and strictly positive.
struct ShiftPath {
  double x = 0.0;
  std::vector<double> jump_times;
  std::vector<double> values;

  void clear() {
    x = 0.0;
    jump_times.clear();
    values.clear();
  }
  double y_at(double t) const;
  ShiftTrajectory sample(std::span<const double> grid) const;
};

// Truncated Lorentzian: half-width mu_av, support |x| <= mu_max, renormalized.
double sample_static_shift(const ThermalBathParams& bath, RandomStream& rng);
double truncated_lorentzian_cdf(double x, double mu_av, double mu_max);

// Microscopic engine: n_fluctuators symmetric telegraph fluctuators, each flipping at rate kappa/2
// so that sign correlations decay as exp(-kappa t). Couplings v/u with u uniform in [1, u_out];
// v = mu_max and u_out fixed so the summed half-width equals mu_av. Geometry is redrawn per call.
// x is the initial bath contribution; jumps are exact flip times up to t_end.
void telegraph_path(const ThermalBathParams& bath, double t_end, RandomStream& rng, ShiftPath& out);
// Throws NumericError if the expected flip count per grid step exceeds 1e3.
ShiftTrajectory telegraph_realization(const ThermalBathParams& bath, std::span<const double> grid,
                                      RandomStream& rng);

// Fast engine. The total shift z = x + y follows the Poisson limit of the telegraph bath:
// during dt a Cauchy(p mu_av) part A of z, p = (1 - e^{-kappa dt})/2, reverses sign, with A drawn
// conditionally on z. Unconditionally y moves by a Cauchy step of half-width mu_av (1 - e^{-kappa dt})
// ~ m dt, E[z'|z] = z e^{-kappa dt}, and the Cauchy(mu_av) law of z is stationary.
// Throws PreconditionError if dt <= 0 or dt > 0.1 / (m_rate rho).
double ka_step(double x, double y, double dt, const ThermalBathParams& bath, RandomStream& rng);
// x from sample_static_shift; steps of dt; each step holds the value at its midpoint.
void ka_path(const ThermalBathParams& bath, double t_end, double dt, RandomStream& rng, ShiftPath& out);
ShiftTrajectory ka_realization(const ThermalBathParams& bath, std::span<const double> grid, double dt,
                               RandomStream& rng);

enum class EngineKind { telegraph, ka };

const char* to_string(EngineKind kind);
EngineKind engine_from_string(const char* name);

// Engine selection plus the bath quantities shared by every TLS.
struct DiffusionEngine {
  EngineKind kind = EngineKind::telegraph;
  double kappa = 0.0;
  int n_fluctuators = 64;
  double ka_dt = 0.0;  // ka only

  ThermalBathParams bath(const TlsParams& tls) const { return bath_for(tls, kappa, n_fluctuators); }
  void realize(const TlsParams& tls, double t_end, RandomStream& rng, ShiftPath& out) const;
};

struct WidthParams {
  double t1_min = 0.0;  // s
  double mu_av = 0.0;   // rad/s
};

// W(t) = c mu_av * int_0^inf dy/cosh^2 y int_0^1 (1 - exp(-x^2 t / T1(y)))/x dx with the thermal
// relaxation rate 1/T1(y) = y^3 coth(y) / t1_min and c = 128/pi^4, so that W'(0) = mu_av / t1_min.
double width_function(double t, const WidthParams& wp);

// Lorentzian with half-width W = mu_av kappa t. Requires 0 < t and kappa t <= 0.1.
double propagator_density(double y, double t, const ThermalBathParams& bath);
double propagator_cdf(double y, double t, const ThermalBathParams& bath);

// (1/2pi) int dtau e^{i x tau} exp(-mu_av (sqrt(tau^2 + rho^2) - rho)), by quadrature.
double stationary_density(double x, const ThermalBathParams& bath);

// CSV with header t_us,x_MHz,y_MHz.
void write_trajectory_csv(std::ostream& os, const ShiftTrajectory& traj);

}  // namespace dephasim
