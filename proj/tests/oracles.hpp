#pragma once

// Shared reference helpers for the unit tests: a deterministic RNG, a
// long-double Bessel series, and a finite-difference Jacobian.

#include <array>
#include <cmath>
#include <cstdint>

#include "fluxmech/model.hpp"

namespace testutil {

/// Deterministic 64-bit LCG; uniform() yields doubles in [0, 1).
struct Lcg {
  std::uint64_t s;
  explicit Lcg(std::uint64_t seed) : s(seed) {}
  double uniform() {
    s = s * 6364136223846793005ULL + 1442695040888963407ULL;
    return static_cast<double>(s >> 11) * 0x1.0p-53;
  }
  double range(double lo, double hi) { return lo + (hi - lo) * uniform(); }
};

/// Ascending power series for J_n(x) in long double; accurate for |x| <= 15.
inline long double bessel_series_ref(int n, long double x) {
  long double half = x / 2.0L;
  long double term = 1.0L;
  for (int k = 1; k <= n; ++k) term *= half / k;
  long double sum = term;
  long double m = -half * half;
  for (int k = 1; k < 400; ++k) {
    term *= m / (static_cast<long double>(k) * (n + k));
    sum += term;
    if (std::abs(term) < 1e-24L * std::abs(sum) && k > 4) break;
  }
  return sum;
}

/// Central finite-difference Jacobian of eom_rhs in the real layout.
inline std::array<std::array<double, 5>, 5>
fd_jacobian(const std::array<double, 5>& y, const fluxmech::EomParams& p,
            double h = 1e-6) {
  std::array<std::array<double, 5>, 5> jac{};
  for (int j = 0; j < 5; ++j) {
    std::array<double, 5> yp = y, ym = y, fp{}, fm{};
    double hj = h * std::max(1.0, std::abs(y[j]));
    yp[j] += hj;
    ym[j] -= hj;
    fluxmech::eom_rhs(yp, fp, p);
    fluxmech::eom_rhs(ym, fm, p);
    for (int i = 0; i < 5; ++i) jac[i][j] = (fp[i] - fm[i]) / (2.0 * hj);
  }
  return jac;
}

} // namespace testutil
