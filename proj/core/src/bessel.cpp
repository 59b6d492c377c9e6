#include <algorithm>
#include <cmath>
#include <vector>

#include "dephasim/dynamics.hpp"
#include "dephasim/errors.hpp"

namespace dephasim {

std::vector<BesselWeight> bessel_weights(double x, double tol) {
  if (!(x >= 0.0)) throw PreconditionError("bessel_weights: x must be non-negative");
  if (!(tol > 0.0 && tol < 1.0)) throw PreconditionError("bessel_weights: tol must lie in (0, 1)");
  if (x == 0.0) return {{0, 1.0}};

  int m_keep = static_cast<int>(std::ceil(x + 20.0));
  for (;;) {
    const int start = m_keep + std::max(40, static_cast<int>(std::ceil(0.5 * x)));
    std::vector<double> j(static_cast<std::size_t>(start) + 2, 0.0);
    j[static_cast<std::size_t>(start)] = 1.0;
    for (int m = start; m >= 1; --m) {
      const auto i = static_cast<std::size_t>(m);
      j[i - 1] = 2.0 * m / x * j[i] - j[i + 1];
      // Rescaling keeps every square finite; the far tail may underflow to zero.
      if (std::abs(j[i - 1]) > 1e100) {
        for (std::size_t r = i - 1; r <= static_cast<std::size_t>(start) + 1; ++r) j[r] *= 1e-100;
      }
    }
    double sum_sq = j[0] * j[0];
    double even_sum = j[0];
    for (std::size_t m = 1; m < j.size(); ++m) {
      sum_sq += 2.0 * j[m] * j[m];
      if (m % 2 == 0) even_sum += 2.0 * j[m];
    }
    const double scale = std::copysign(1.0 / std::sqrt(sum_sq), even_sum);
    double kept = 0.0;
    for (int m = 0; m <= m_keep; ++m) {
      const double v = j[static_cast<std::size_t>(m)] * scale;
      kept += (m == 0 ? 1.0 : 2.0) * v * v;
    }
    if (kept < 1.0 - tol) {
      m_keep += 10;
      continue;
    }
    std::vector<BesselWeight> out;
    out.reserve(2 * static_cast<std::size_t>(m_keep) + 1);
    for (int m = -m_keep; m <= m_keep; ++m) {
      const double v = j[static_cast<std::size_t>(std::abs(m))] * scale;
      out.push_back({m, (m < 0 && (m % 2) != 0) ? -v : v});
    }
    return out;
  }
}

double bessel_s4(double x) {
  double s4 = 0.0;
  for (const auto& w : bessel_weights(x)) s4 += w.j * w.j * w.j * w.j;
  return s4;
}

}  // namespace dephasim
