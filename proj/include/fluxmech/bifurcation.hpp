#pragma once

#include <array>
#include <complex>
#include <string>
#include <vector>

#include "fluxmech/dynamics.hpp"
#include "fluxmech/errors.hpp"
#include "fluxmech/types.hpp"

namespace fluxmech {

/// An equilibrium of the coupled equations with its linearization attached.
struct EquilibriumPoint {
  SystemState state;
  double residual_norm = 0.0;
  std::array<std::complex<double>, 5> eigenvalues{};
  bool stable = false; // all eigenvalue real parts strictly negative
};

/// Analytic limit-cycle threshold and amplitudes in the rotating-wave,
/// near-resonant regime. Amplitudes r_s, r_a live in the diagonal basis of
/// the linearized equations; s_cz is the mean inversion shift.
struct LimitCyclePrediction {
  double g_crit = 0.0;
  double r_s = 0.0;
  double r_a = 0.0;
  double s_cz = 0.0;
  double omega_a = 0.0; // cycle frequency offset, proportional to sigma
  double f_sigma = 0.0; // phase lag between qubit and oscillator motion
  bool below_threshold = false;
};

/// Coupling value where the maximum eigenvalue real part crosses zero,
/// with the imaginary part of the crossing pair.
struct HopfPoint {
  double g = 0.0;
  double frequency = 0.0;
};

/// One continuation point: the equilibrium at coupling g and, when the
/// equilibrium is unstable, the simulated limit cycle with per-coordinate
/// extrema over one window on the attractor.
struct BranchPoint {
  double g = 0.0;
  EquilibriumPoint eq;
  bool has_cycle = false;
  LimitCycleMeasurement cycle;
  std::array<double, 5> cycle_max{};
  std::array<double, 5> cycle_min{};
  double max_abs_alpha = 0.0;
  double min_abs_alpha = 0.0;
};

/// Continuation results over a strictly increasing coupling grid. When a
/// Newton solve fails mid-branch the sweep stops early, `truncated` is set
/// and `diagnostic` explains where and why.
struct BranchData {
  std::vector<BranchPoint> points;
  bool truncated = false;
  std::string diagnostic;
};

/// Thrown when the damped Newton iteration cannot reach the residual
/// target; carries the best iterate found.
class newton_failure : public numeric_error {
 public:
  newton_failure(const std::string& what, EquilibriumPoint best)
      : numeric_error(what), best_(std::move(best)) {}

  [[nodiscard]] const EquilibriumPoint& best() const { return best_; }

 private:
  EquilibriumPoint best_;
};

/// Closed-form starting point for equilibrium searches: the qubit steady
/// state of the decoupled Bloch equations plus the oscillator displacement
/// it sources.
[[nodiscard]] SystemState equilibrium_guess(const EomParams& params);

/// Damped Newton iteration on the full 5-dimensional right-hand side using
/// the analytic Jacobian. Converges to residual 2-norm < 1e-12; attaches
/// the Jacobian eigenvalues and the stability flag.
[[nodiscard]] EquilibriumPoint find_equilibrium(const EomParams& params,
                                                const SystemState& guess);

/// Locates the coupling where the equilibrium loses stability by bisection
/// on the maximum eigenvalue real part over [g_lo, g_hi]. Requires the
/// stability to differ between the endpoints; throws numeric_error when
/// there is no crossing. The bracket is narrowed to relative width < 1e-6.
[[nodiscard]] HopfPoint hopf_threshold(const EomParams& base, double g_lo,
                                       double g_hi, const SystemState& guess);

/// Critical coupling of the self-oscillation instability,
/// sqrt(2 gamma_m Omega_R^2 (gamma2n^2 + sigma^2) / (s_z_eq_bar gamma2n Delta_n^2)).
/// Throws numeric_error when s_z_eq_bar <= 0 (no instability for any g) or
/// when the dressed gap or dephasing vanish.
[[nodiscard]] double g_crit_analytic(const DerivedParams& d,
                                     const MechanicalParams& mech);

/// Evaluates the weakly nonlinear limit-cycle amplitudes and frequency
/// shift at coupling g. Below threshold the amplitudes are zero and the
/// flag is set.
[[nodiscard]] LimitCyclePrediction limit_cycle_prediction(
    const DerivedParams& d, const MechanicalParams& mech, double g);

/// Natural-parameter continuation over g_grid: warm-started Newton per
/// point, stability classification, and for unstable equilibria a simulated
/// limit cycle (steady_state + limit_cycle_measure) with per-coordinate
/// extrema. cycle_budget = 0 picks an automatic settling budget.
[[nodiscard]] BranchData continuation_sweep(const EomParams& base,
                                            const std::vector<double>& g_grid,
                                            const SystemState& guess,
                                            double cycle_budget = 0.0);

} // namespace fluxmech
