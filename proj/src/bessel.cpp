#include "fluxmech/bessel.hpp"

#include <cmath>
#include <stdexcept>
#include <vector>

#include "fluxmech/errors.hpp"

namespace fluxmech {
namespace {

// Ascending power series; alternating terms stay benign for |x| <= 12.
double jn_series(int n, double x) {
    const double half = 0.5 * x;
    // term_0 = (x/2)^n / n!
    double term = 1.0;
    for (int k = 1; k <= n; ++k) term *= half / k;
    double sum = term;
    const double m = -half * half;
    for (int k = 1; k <= 200; ++k) {
        term *= m / (static_cast<double>(k) * (n + k));
        sum += term;
        if (std::abs(term) < 1e-18 * (std::abs(sum) + 1e-300)) break;
    }
    return sum;
}

// Miller downward recurrence normalized by J_0 + 2*sum_k J_{2k} = 1.
double jn_miller(int n, double x) {
    const int xi = static_cast<int>(x);
    const int base = n > xi ? n : xi;
    int m = base + 2 * static_cast<int>(std::sqrt(40.0 + base)) + 40;
    if (m % 2 != 0) ++m;

    double jp = 0.0;       // J~_{k+1}
    double jc = 1e-300;    // J~_k
    double norm = 0.0;     // accumulates J_0 + 2*sum J_{2k}
    double result = 0.0;
    for (int k = m; k >= 0; --k) {
        const double jm = (2.0 * (k + 1) / x) * jc - jp; // J~_k from k+1, k+2
        jp = jc;
        jc = jm;
        if (std::abs(jc) > 1e250) { // rescale to dodge overflow
            jc *= 1e-250;
            jp *= 1e-250;
            norm *= 1e-250;
            result *= 1e-250;
        }
        if (k % 2 == 0) norm += (k == 0) ? jc : 2.0 * jc;
        if (k == n) result = jc;
    }
    return result / norm;
}

} // namespace

double bessel_jn(int n, double x) {
    if (!std::isfinite(x)) throw config_error("bessel_jn: non-finite argument");
    if (n < 0) throw config_error("bessel_jn: order must be >= 0");
    // J_n(-x) = (-1)^n J_n(x)
    const double sgn = (x < 0.0 && n % 2 != 0) ? -1.0 : 1.0;
    const double ax = std::abs(x);
    if (ax == 0.0) return n == 0 ? 1.0 : 0.0;
    // series cancellation grows like exp(|x|)*eps, so hand over to the
    // backward recurrence early enough to hold ~1e-14 absolute error
    if (ax <= 8.0) return sgn * jn_series(n, ax);
    return sgn * jn_miller(n, ax);
}

} // namespace fluxmech
