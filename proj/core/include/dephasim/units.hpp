#pragma once

#include <numbers>

// Internal units: angular frequency in rad/s, time in s, hbar = 1.
// Human units at the boundary: ordinary frequency in MHz, time in us.
namespace dephasim::units {

inline constexpr double kTwoPi = 2.0 * std::numbers::pi;
inline constexpr double kRadPerMHz = kTwoPi * 1.0e6;

constexpr double from_mhz(double f_mhz) { return f_mhz * kRadPerMHz; }
constexpr double to_mhz(double omega) { return omega / kRadPerMHz; }
constexpr double from_us(double t_us) { return t_us * 1.0e-6; }
constexpr double to_us(double t) { return t * 1.0e6; }

}  // namespace dephasim::units
