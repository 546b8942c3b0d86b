#pragma once

#include <iosfwd>
#include <vector>

#include "fluxmech/errors.hpp"
#include "fluxmech/types.hpp"

namespace fluxmech {

/// Qubit response at the mechanical frequency and the resulting
/// renormalization of the oscillator parameters. By construction
/// gamma_m_tilde = gamma_m - g*Im(chi) and
/// omega_m_tilde = omega_m + (g/2)*Re(chi).
struct ResponseResult {
  complexd chi{0.0, 0.0};     ///< chi_z evaluated at -i*omega_m
  double gamma_m_tilde = 0.0; ///< renormalized mechanical decay rate
  double omega_m_tilde = 0.0; ///< renormalized mechanical frequency
};

/// One tabulated response sample.
struct ResponsePoint {
  double omega = 0.0;
  double re_chi = 0.0;
  double im_chi = 0.0;
};

/// Tabulated response over a frequency grid plus the located interior
/// local maxima of |Im chi_z|.
struct ResponseCurves {
  std::vector<ResponsePoint> points;
  std::vector<double> peak_omegas;
};

/// Closed-form inversion response of the driven qubit,
///   chi_z(-i omega) = -2 Omega_R G (2 gamma2 - i omega) /
///     [(gamma1n - i omega)(gamma2n - i(omega - Omega_R))
///      (gamma2n - i(omega + Omega_R))],
/// with the bare transverse rate in the numerator. chi_z is the coefficient
/// relating the inversion to the complex oscillator amplitude, so the
/// renormalization formulas below hold without extra factors.
/// Throws numeric_error on an exact pole hit (possible only when the
/// dressed rates vanish and omega lands on a resonance).
[[nodiscard]] complexd chi_z(double omega, const DerivedParams& d);

/// Two-Lorentzian sideband approximation of chi_z:
///   Im = G [g2n/(g2n^2+(w+W)^2) - g2n/(g2n^2+(w-W)^2)],
///   Re = G [(w+W)/(g2n^2+(w+W)^2) + (w-W)/(g2n^2+(w-W)^2)],
/// with W = Omega_R and g2n the dressed dephasing rate.
[[nodiscard]] complexd chi_z_sas(double omega, const DerivedParams& d);

/// Evaluates chi_z at the mechanical frequency and applies the
/// renormalization of the oscillator decay rate and frequency.
[[nodiscard]] ResponseResult renormalized_mech(const DerivedParams& d,
                                               const MechanicalParams& mech);

/// Independent numerical measurement of chi_z: integrates only the qubit
/// Bloch equations with the oscillator amplitude prescribed as
/// alpha_eq + alpha0*exp(-i omega t), where alpha_eq is the coupled
/// equilibrium displacement, then extracts the Fourier coefficient of s_z
/// at the drive frequency over the trailing two thirds of the run (integer
/// cycles only) and divides by alpha0.
///
/// alpha0 <= 0 selects the default 1e-4*|Delta_n/g| clipped into
/// [1e-8, 0.05]; cycles <= 0 selects an automatic count covering the
/// transient decay; an explicit count must be >= 6. The two halves of the
/// measurement window must agree within 1%, otherwise the transient has
/// not decayed and a numeric_error is thrown.
[[nodiscard]] complexd chi_z_numeric(double omega, const EomParams& params,
                                     double alpha0 = 0.0, int cycles = 0);

/// Tabulates chi_z over omega_grid and locates interior local maxima of
/// |Im chi_z|. The grid must be nonempty and strictly increasing.
[[nodiscard]] ResponseCurves response_curves(const std::vector<double>& omega_grid,
                                             const DerivedParams& d);

/// Writes `omega,delta,re_chi,im_chi,abs_chi,arg_chi` rows (%.17g).
void write_response_csv(std::ostream& os, const std::vector<ResponsePoint>& points,
                        double delta);

} // namespace fluxmech
