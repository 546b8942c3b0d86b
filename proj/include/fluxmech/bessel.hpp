#pragma once

namespace fluxmech {

/// Bessel function of the first kind J_n(x), n >= 0.
/// Power series for small |x|, normalized downward recurrence otherwise.
/// Absolute error < 1e-12 for |x| <= 50.
double bessel_jn(int n, double x);

} // namespace fluxmech
