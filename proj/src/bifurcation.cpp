#include "fluxmech/bifurcation.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>
#include <string>

#include "fluxmech/linalg.hpp"
#include "fluxmech/model.hpp"

namespace fluxmech {
namespace {

using complexd = std::complex<double>;
constexpr double two_pi = 2.0 * std::numbers::pi;

double norm2(const std::array<double, 5>& v) {
  double s = 0.0;
  for (double x : v) s += x * x;
  return std::sqrt(s);
}

void check_finite(const EomParams& p) {
  for (double v : {p.delta, p.delta_n, p.gamma1, p.gamma2, p.sigma_z_eq,
                   p.omega_m, p.gamma_m, p.g})
    if (!std::isfinite(v))
      throw config_error("equilibrium: non-finite model parameter");
}

EquilibriumPoint classify(const std::array<double, 5>& y, double residual,
                          const EomParams& p) {
  std::array<std::array<double, 5>, 5> j{};
  eom_jacobian(y, j, p);
  SquareMatrix a(5);
  for (std::size_t r = 0; r < 5; ++r)
    for (std::size_t c = 0; c < 5; ++c) a(r, c) = j[r][c];

  EquilibriumPoint eq;
  eq.state = SystemState::from_array(y);
  eq.residual_norm = residual;
  auto w = eigenvalues(a);
  bool stable = true;
  for (std::size_t i = 0; i < 5; ++i) {
    eq.eigenvalues[i] = w[i];
    if (!(w[i].real() < 0.0)) stable = false;
  }
  eq.stable = stable;
  return eq;
}

double max_real_part(const EquilibriumPoint& eq) {
  double m = eq.eigenvalues[0].real();
  for (auto v : eq.eigenvalues) m = std::max(m, v.real());
  return m;
}

} // namespace

SystemState equilibrium_guess(const EomParams& p) {
  check_finite(p);
  // decoupled Bloch steady state
  double d2 = p.gamma2 * p.gamma2 + p.delta * p.delta;
  double den = p.gamma1 * d2 + p.delta_n * p.delta_n * p.gamma2;
  double s_z = den > 0.0 ? p.sigma_z_eq * p.gamma1 * d2 / den : p.sigma_z_eq;
  complexd s_minus{0.0, 0.0};
  if (d2 > 0.0)
    s_minus = 0.5 * p.delta_n * s_z * complexd{p.delta, p.gamma2} / d2;
  // oscillator displacement sourced by that inversion
  complexd alpha = -p.g * s_z / complexd{2.0 * p.omega_m, -p.gamma_m};
  return SystemState{s_minus, s_z, alpha};
}

EquilibriumPoint find_equilibrium(const EomParams& params,
                                  const SystemState& guess) {
  check_finite(params);
  std::array<double, 5> y = guess.to_array();
  for (double v : y)
    if (!std::isfinite(v))
      throw config_error("find_equilibrium: non-finite guess");

  constexpr int max_iters = 100;
  constexpr double target = 1e-13;

  std::array<double, 5> r{};
  eom_rhs(y, r, params);
  double rn = norm2(r);
  std::array<double, 5> best_y = y;
  double best_rn = rn;

  for (int iter = 0; iter < max_iters && rn >= target; ++iter) {
    std::array<std::array<double, 5>, 5> j{};
    eom_jacobian(y, j, params);
    SquareMatrix a(5);
    std::vector<double> b(5);
    for (std::size_t ri = 0; ri < 5; ++ri) {
      b[ri] = -r[ri];
      for (std::size_t ci = 0; ci < 5; ++ci) a(ri, ci) = j[ri][ci];
    }

    std::vector<double> dy;
    try {
      dy = lu_solve(a, b);
    } catch (const numeric_error&) {
      throw newton_failure("find_equilibrium: singular Jacobian at residual " +
                               std::to_string(best_rn),
                           classify(best_y, best_rn, params));
    }

    // backtracking damping on the residual norm
    double lambda = 1.0;
    std::array<double, 5> y_try{};
    std::array<double, 5> r_try{};
    double rn_try = rn;
    bool improved = false;
    while (lambda >= 1.0 / 1024.0) {
      for (std::size_t i = 0; i < 5; ++i) y_try[i] = y[i] + lambda * dy[i];
      eom_rhs(y_try, r_try, params);
      rn_try = norm2(r_try);
      if (std::isfinite(rn_try) && rn_try < (1.0 - 1e-4 * lambda) * rn) {
        improved = true;
        break;
      }
      lambda *= 0.5;
    }
    if (!improved) break; // stalled; report the best iterate below

    y = y_try;
    r = r_try;
    rn = rn_try;
    if (rn < best_rn) {
      best_rn = rn;
      best_y = y;
    }
  }

  if (!(best_rn < 1e-12))
    throw newton_failure("find_equilibrium: Newton stalled at residual " +
                             std::to_string(best_rn),
                         classify(best_y, best_rn, params));
  return classify(best_y, best_rn, params);
}

HopfPoint hopf_threshold(const EomParams& base, double g_lo, double g_hi,
                         const SystemState& guess) {
  if (!(g_hi > g_lo))
    throw config_error("hopf_threshold: need g_hi > g_lo");

  EomParams p = base;
  SystemState warm = guess;
  auto mu_at = [&](double g) {
    p.g = g;
    EquilibriumPoint eq = find_equilibrium(p, warm);
    warm = eq.state;
    return eq;
  };

  EquilibriumPoint eq_lo = mu_at(g_lo);
  double mu_lo = max_real_part(eq_lo);
  EquilibriumPoint eq_hi = mu_at(g_hi);
  double mu_hi = max_real_part(eq_hi);
  if (!(mu_lo <= 0.0 && mu_hi > 0.0))
    throw numeric_error(
        "hopf_threshold: no stability change across the coupling range");

  double lo = g_lo, hi = g_hi;
  EquilibriumPoint eq_at_hi = eq_hi;
  for (int it = 0; it < 60; ++it) {
    double mid = 0.5 * (lo + hi);
    EquilibriumPoint eq_mid = mu_at(mid);
    if (max_real_part(eq_mid) > 0.0) {
      hi = mid;
      eq_at_hi = eq_mid;
    } else {
      lo = mid;
    }
    if (hi - lo < 1e-7 * std::max(std::abs(hi), 1e-300) && it >= 25) break;
  }

  // Hopf frequency: imaginary part of the pair that crosses, read just on
  // the unstable side of the bracket
  double freq = 0.0, best = -1e300;
  for (auto v : eq_at_hi.eigenvalues)
    if (v.real() > best) {
      best = v.real();
      freq = std::abs(v.imag());
    }
  return HopfPoint{0.5 * (lo + hi), freq};
}

double g_crit_analytic(const DerivedParams& d, const MechanicalParams& mech) {
  if (!(d.s_z_eq_bar > 0.0))
    throw numeric_error(
        "g_crit_analytic: no instability (equilibrium inversion in the "
        "rotating frame is not positive)");
  if (!(d.gamma2n > 0.0) || d.delta_n == 0.0)
    throw numeric_error(
        "g_crit_analytic: threshold undefined without dephasing and a "
        "dressed gap");
  double sigma = d.sigma_detune;
  double num = 2.0 * mech.gamma_m * d.omega_rabi * d.omega_rabi *
               (d.gamma2n * d.gamma2n + sigma * sigma);
  double den = d.s_z_eq_bar * d.gamma2n * d.delta_n * d.delta_n;
  return std::sqrt(num / den);
}

LimitCyclePrediction limit_cycle_prediction(const DerivedParams& d,
                                            const MechanicalParams& mech,
                                            double g) {
  if (g == 0.0) throw config_error("limit_cycle_prediction: g must be nonzero");

  LimitCyclePrediction out;
  out.g_crit = g_crit_analytic(d, mech);
  double denom = 2.0 * d.gamma2n + mech.gamma_m;
  out.omega_a = mech.gamma_m * d.sigma_detune / denom;
  out.f_sigma = std::atan(2.0 * d.sigma_detune / denom);

  double ratio = (g * g) / (out.g_crit * out.g_crit);
  if (ratio <= 1.0) {
    out.below_threshold = true;
    return out;
  }
  double excess = std::sqrt(ratio - 1.0);
  out.r_s = 0.5 * d.s_z_eq_bar * std::sqrt(d.gamma1n / d.gamma2n) *
            (1.0 / ratio) * excess;
  out.r_a = std::sqrt(d.gamma1n * d.s_z_eq_bar / (2.0 * mech.gamma_m)) *
            (out.g_crit / std::abs(g)) * excess;
  out.s_cz = d.s_z_eq_bar * (1.0 / ratio - 1.0);
  return out;
}

BranchData continuation_sweep(const EomParams& base,
                              const std::vector<double>& g_grid,
                              const SystemState& guess, double cycle_budget) {
  if (g_grid.empty()) throw config_error("continuation_sweep: empty grid");
  for (std::size_t i = 1; i < g_grid.size(); ++i)
    if (!(g_grid[i] > g_grid[i - 1]))
      throw config_error("continuation_sweep: grid must increase strictly");

  BranchData branch;
  branch.points.reserve(g_grid.size());

  EomParams p = base;
  SystemState warm = guess;
  bool have_cycle_seed = false;
  SystemState cycle_seed;
  const double t_period = two_pi / p.omega_m;
  if (cycle_budget <= 0.0) cycle_budget = 3e5 * t_period;

  for (double g : g_grid) {
    p.g = g;
    BranchPoint bp;
    bp.g = g;
    try {
      bp.eq = find_equilibrium(p, warm);
    } catch (const newton_failure& e) {
      branch.truncated = true;
      branch.diagnostic =
          "Newton failed at g=" + std::to_string(g) + ": " + e.what();
      break;
    }
    warm = bp.eq.state;

    if (!bp.eq.stable) {
      SystemState start;
      if (have_cycle_seed) {
        start = cycle_seed;
      } else {
        // deterministic kick off the unstable equilibrium
        start = bp.eq.state;
        start.alpha += complexd{1e-3, 0.0};
        start.s_minus += complexd{1e-3, 0.0};
      }
      SteadyState ss = steady_state(p, start, cycle_budget);
      if (ss.kind == SteadyStateKind::limit_cycle && ss.cycle.converged) {
        // one clean window on the attractor for per-coordinate extrema
        double t_win = 60.0 * t_period;
        Trajectory win = integrate(ss.state, p, 0.0, t_win, 1e-10, 1e-12);
        bp.cycle = limit_cycle_measure(win, 0.0);
        bp.has_cycle = true;
        auto first = win.states.front().to_array();
        bp.cycle_max = first;
        bp.cycle_min = first;
        bp.max_abs_alpha = std::abs(win.states.front().alpha);
        bp.min_abs_alpha = bp.max_abs_alpha;
        for (const SystemState& s : win.states) {
          auto arr = s.to_array();
          for (std::size_t i = 0; i < 5; ++i) {
            bp.cycle_max[i] = std::max(bp.cycle_max[i], arr[i]);
            bp.cycle_min[i] = std::min(bp.cycle_min[i], arr[i]);
          }
          double aa = std::abs(s.alpha);
          bp.max_abs_alpha = std::max(bp.max_abs_alpha, aa);
          bp.min_abs_alpha = std::min(bp.min_abs_alpha, aa);
        }
        cycle_seed = win.states.back();
        have_cycle_seed = true;
      }
    }
    branch.points.push_back(std::move(bp));
  }
  return branch;
}

} // namespace fluxmech
