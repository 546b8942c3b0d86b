#pragma once

// Time integration of the coupled qubit-oscillator equations plus the
// estimators that turn trajectories into effective damping, frequency,
// and limit-cycle measurements.

#include <iosfwd>
#include <memory>
#include <string>
#include <vector>

#include "fluxmech/model.hpp"
#include "fluxmech/ode.hpp"
#include "fluxmech/types.hpp"

namespace fluxmech {

/// Uniformly sampled solution of the equations of motion.
struct Trajectory {
  std::vector<double> times;       ///< strictly increasing time stamps
  std::vector<SystemState> states; ///< one state per time stamp
  StepStats stats;                 ///< step counts and tolerances used
};

/// Raised when the adaptive integrator cannot continue (stiff blowup or
/// exhausted step budget); carries the trajectory sampled so far.
class integration_failure : public numeric_error {
public:
  integration_failure(const std::string& what, Trajectory partial)
      : numeric_error(what),
        partial_(std::make_shared<Trajectory>(std::move(partial))) {}
  /// Samples accumulated before the failure.
  const Trajectory& partial() const noexcept { return *partial_; }

private:
  std::shared_ptr<const Trajectory> partial_;
};

/// Exponential ring-down fit of the oscillator coordinate.
struct RingdownFit {
  double gamma_eff = 0.0; ///< fitted energy decay rate of the |alpha| envelope
                          ///< (negative means growth, anti-damping)
  double omega_eff = 0.0; ///< fitted oscillation frequency of alpha
  double residual = 0.0;  ///< rms residual of the log-envelope line fit
};

/// Measured properties of a (near-)periodic steady oscillation.
struct LimitCycleMeasurement {
  double amp_alpha = 0.0;   ///< steady |alpha| oscillation amplitude about its mean
  double amp_s_minus = 0.0; ///< steady |s_-| oscillation amplitude
  double mean_s_z = 0.0;    ///< time-averaged s_z on the cycle
  double freq = 0.0;        ///< dominant oscillation angular frequency
  bool converged = false;   ///< cycle-to-cycle amplitude variation < 1%
};

/// Outcome of long-time classification of an initial condition.
enum class SteadyStateKind { fixed_point, limit_cycle, undetermined };

/// Classification result; `cycle` is meaningful only for limit_cycle.
struct SteadyState {
  SteadyStateKind kind = SteadyStateKind::undetermined;
  SystemState state;           ///< state at the end of classification
  LimitCycleMeasurement cycle; ///< cycle measurement (limit_cycle only)
  double t_elapsed = 0.0;      ///< total integrated time
};

/// Sampling interval giving >= 32 samples per shortest period among
/// omega_m and |Omega_R| (the latter from delta, delta_n).
[[nodiscard]] double default_sample_dt(const EomParams& params);

/// Integrates the equations of motion from state0 over [t0, t1] with the
/// requested tolerances, sampling every sample_dt via dense interpolation
/// (sample_dt <= 0 selects default_sample_dt). The final time t1 is always
/// included. Deterministic given inputs. Tolerances must lie in (0, 1e-2].
/// Throws integration_failure (with the partial trajectory) on step-size
/// underflow.
[[nodiscard]] Trajectory integrate(const SystemState& state0, const EomParams& params,
                                   double t0, double t1, double rel_tol, double abs_tol,
                                   double sample_dt = 0.0,
                                   OdeScheme scheme = OdeScheme::rk853);

/// Fits gamma_eff and omega_eff of a free ring-down (or ring-up): subtracts
/// the asymptotic offset of alpha, fits a line to the log of the envelope
/// |alpha - offset|, and measures the rotation rate by complex demodulation.
/// Requires >= 50 oscillation periods of usable signal; throws numeric_error
/// for too-short or non-oscillatory input.
[[nodiscard]] RingdownFit ringdown_fit(const Trajectory& traj);

/// Measures the steady oscillation in the trailing (1 - transient_fraction)
/// window: per-cycle half peak-to-peak amplitude of the oscillating
/// quadrature about the window mean, averaged over cycles; mean s_z; cycle
/// frequency from zero crossings refined by phase regression. converged is
/// true when the per-cycle amplitudes agree within 1% (or the signal has
/// fully settled to a fixed point, where the amplitude is ~0).
[[nodiscard]] LimitCycleMeasurement limit_cycle_measure(const Trajectory& traj,
                                                        double transient_fraction = 0.5);

/// Integrates in windows of ~120 oscillation periods and classifies the
/// long-time attractor: fixed_point when the per-window state variation
/// contracts to the noise floor, limit_cycle when it stabilizes at a nonzero
/// level (measured over the final window), undetermined when the time budget
/// t_budget runs out first.
[[nodiscard]] SteadyState steady_state(const EomParams& params, const SystemState& state0,
                                       double t_budget, double rel_tol = 1e-10,
                                       double abs_tol = 1e-12);

/// Writes `t,re_s_minus,im_s_minus,s_z,re_alpha,im_alpha` rows (%.17g).
void write_trajectory_csv(std::ostream& os, const Trajectory& traj);

} // namespace fluxmech
