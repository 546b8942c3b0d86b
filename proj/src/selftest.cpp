#include "fluxmech/selftest.hpp"

// The acceptance suite: ten end-to-end checks of the toolbox against
// independent references (finite differences, conserved quantities, a
// numerically measured response, closed-form thresholds and amplitudes,
// Bessel zeros, and bitwise replay of the command-line tool). Each check
// prints one PASS/FAIL line with the measured numbers and pinned tolerance.

#include <algorithm>
#include <array>
#include <chrono>
#include <cmath>
#include <complex>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <functional>
#include <iomanip>
#include <numbers>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "fluxmech/bifurcation.hpp"
#include "fluxmech/dynamics.hpp"
#include "fluxmech/errors.hpp"
#include "fluxmech/manifest.hpp"
#include "fluxmech/maps.hpp"
#include "fluxmech/model.hpp"
#include "fluxmech/response.hpp"
#include "fluxmech/types.hpp"

namespace fluxmech {

namespace {

constexpr double kPi = std::numbers::pi;

struct Outcome {
  bool ok = false;
  std::string detail;
};

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.3g", v);
  return buf;
}

/// Deterministic 64-bit LCG so the random Jacobian probes are replayable.
struct Lcg {
  std::uint64_t s;
  explicit Lcg(std::uint64_t seed) : s(seed) {}
  double uniform() {
    s = s * 6364136223846793005ULL + 1442695040888963407ULL;
    return static_cast<double>(s >> 11) * 0x1.0p-53;
  }
  double range(double lo, double hi) { return lo + (hi - lo) * uniform(); }
};

/// Least squares slope and R^2 of y against x.
struct LineFit {
  double slope = 0.0;
  double r2 = 0.0;
};

LineFit fit_line(const std::vector<double>& x, const std::vector<double>& y) {
  const double n = static_cast<double>(x.size());
  double sx = 0, sy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sx += x[i];
    sy += y[i];
  }
  const double mx = sx / n;
  const double my = sy / n;
  double sxx = 0, sxy = 0, syy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
    syy += (y[i] - my) * (y[i] - my);
  }
  LineFit f;
  f.slope = sxy / sxx;
  f.r2 = syy > 0.0 ? (sxy * sxy) / (sxx * syy) : 1.0;
  return f;
}

// -- criterion 1 -------------------------------------------------------

Outcome crit_jacobian() {
  Lcg rng(2024);
  double worst = 0.0;
  for (int ip = 0; ip < 20; ++ip) {
    EomParams p;
    p.delta = rng.range(-2.0, 2.0);
    p.delta_n = rng.range(-1.5, 1.5);
    p.gamma1 = rng.range(0.0, 0.1);
    p.gamma2 = 0.5 * p.gamma1 + rng.range(0.0, 0.2);
    p.sigma_z_eq = rng.range(-1.0, 1.0);
    p.omega_m = rng.range(0.1, 2.0);
    p.gamma_m = rng.range(0.0, 0.05);
    p.g = rng.range(-0.5, 0.5);
    for (int is = 0; is < 100; ++is) {
      std::array<double, 5> y{rng.range(-1.0, 1.0), rng.range(-1.0, 1.0),
                              rng.range(-1.0, 1.0), rng.range(-3.0, 3.0),
                              rng.range(-3.0, 3.0)};
      std::array<std::array<double, 5>, 5> ja{}, jf{};
      for (int j = 0; j < 5; ++j) {
        std::array<double, 5> yp = y, ym = y, fp{}, fm{};
        const double h = 1e-6 * std::max(1.0, std::abs(y[j]));
        yp[j] += h;
        ym[j] -= h;
        eom_rhs(yp, fp, p);
        eom_rhs(ym, fm, p);
        for (int i = 0; i < 5; ++i) jf[i][j] = (fp[i] - fm[i]) / (2.0 * h);
      }
      eom_jacobian(y, ja, p);
      double scale = 1.0;
      for (int i = 0; i < 5; ++i)
        for (int j = 0; j < 5; ++j) scale = std::max(scale, std::abs(jf[i][j]));
      for (int i = 0; i < 5; ++i)
        for (int j = 0; j < 5; ++j)
          worst = std::max(worst, std::abs(ja[i][j] - jf[i][j]) / scale);
    }
  }
  return {worst < 1e-6, "max relative error " + num(worst) +
                            " over 20 parameter sets x 100 states (tol 1e-06)"};
}

// -- criterion 2 -------------------------------------------------------

Outcome crit_conservation() {
  const double rel = 1e-10, abs_tol = 1e-12;
  double worst = 0.0;
  for (const double g : {0.02, 0.05, 0.1}) { // up to 0.1 * omega_m
    EomParams p{-1.0, 1.0, 0.0, 0.0, -1.0, 1.0, 1e-3, g};
    const SystemState s0{{0.3, -0.2}, -0.8, {1.0, 0.5}};
    const double t_end = 1000.0 * 2.0 * kPi / p.omega_m;
    const Trajectory traj = integrate(s0, p, 0.0, t_end, rel, abs_tol, t_end / 4000.0);
    const double n0 = bloch_norm(s0);
    for (const SystemState& s : traj.states)
      worst = std::max(worst, std::abs(bloch_norm(s) - n0) / n0);
  }
  return {worst < 10.0 * rel,
          "max Bloch-norm drift " + num(worst) + " over 1000 periods, couplings up to "
          "0.1*omega_m (tol " + num(10.0 * rel) + ")"};
}

// -- criterion 3 -------------------------------------------------------

Outcome crit_response_oracle() {
  const QubitParams qubit{0.001, 0.01, -1.0};
  const double delta_n = 1.0;
  const double g = 0.01;
  const MechanicalParams mech{1.0, 1e-4, g};
  double worst_far = 0.0, worst_near = 0.0;
  int n_far = 0, n_near = 0;
  bool ok = true;
  for (int i = 0; i < 10; ++i) {
    const double delta = -1.6 + 0.1 * i;
    const DerivedParams d = derive_secondary(delta, delta_n, qubit, mech);
    const EomParams p{delta,  delta_n,      qubit.gamma1, qubit.gamma2,
                      -1.0,   mech.omega_m, mech.gamma_m, g};
    for (int k = 0; k < 10; ++k) {
      const double w = 0.05 * std::pow(50.0, k / 9.0); // log grid 0.05 .. 2.5
      const complexd ana = chi_z(w, d);
      const complexd mea = chi_z_numeric(w, p);
      const double err = std::abs(mea - ana) / std::abs(ana);
      // distance to the zero-frequency and sideband poles in linewidths
      const double lw = std::min(w / d.gamma1n,
                                 std::abs(w - std::abs(d.omega_rabi)) / d.gamma2n);
      if (lw >= 3.0) {
        worst_far = std::max(worst_far, err);
        ok = ok && err < 0.05;
        ++n_far;
      } else {
        worst_near = std::max(worst_near, err);
        ok = ok && err < 0.15;
        ++n_near;
      }
    }
  }
  return {ok, "max error " + num(worst_far) + " beyond 3 linewidths (" +
                  std::to_string(n_far) + " pts, tol 0.05) and " + num(worst_near) +
                  " near poles (" + std::to_string(n_near) + " pts, tol 0.15)"};
}

// -- criterion 4 -------------------------------------------------------

Outcome crit_ringdown() {
  const QubitParams qubit{0.002, 0.002, -1.0};
  const double delta_n = 1.0;
  struct Pt {
    double delta, sigma, gamma_m;
  };
  const Pt pts[3] = {{-1.0, 0.01, 1e-4}, {-1.2, -0.008, 1e-4}, {-0.8, 0.02, 2e-4}};
  double worst_g = 0.0, worst_w = 0.0;
  bool ok = true, signs_ok = true;
  for (const Pt& bp : pts) {
    for (const double side : {-1.0, 1.0}) {
      const double delta = side * std::abs(bp.delta);
      MechanicalParams mech{1.0, bp.gamma_m, 0.0};
      const double omega_rabi_abs =
          std::abs(derive_secondary(delta, delta_n, qubit, mech).omega_rabi);
      mech.omega_m = omega_rabi_abs + bp.sigma;
      // coupling scale from the blue-detuned twin (the red side has no threshold)
      const DerivedParams d_blue =
          derive_secondary(-std::abs(delta), delta_n, qubit, mech);
      mech.g = 0.3 * g_crit_analytic(d_blue, mech);
      const DerivedParams d = derive_secondary(delta, delta_n, qubit, mech);
      const ResponseResult rm = renormalized_mech(d, mech);

      const EomParams p{delta,        delta_n,      qubit.gamma1, qubit.gamma2,
                        qubit.sigma_z_eq, mech.omega_m, mech.gamma_m, mech.g};
      SystemState s0 = find_equilibrium(p, equilibrium_guess(p)).state;
      s0.alpha += 0.05;
      const Trajectory traj =
          integrate(s0, p, 0.0, 2.0 / rm.gamma_m_tilde, 1e-11, 1e-13);
      const RingdownFit fit = ringdown_fit(traj);

      const double g_err =
          std::abs(fit.gamma_eff - rm.gamma_m_tilde) / rm.gamma_m_tilde;
      const double shift_pred = 0.5 * mech.g * chi_z(mech.omega_m, d).real();
      const double w_err =
          std::abs((fit.omega_eff - mech.omega_m) - shift_pred) / std::abs(shift_pred);
      worst_g = std::max(worst_g, g_err);
      worst_w = std::max(worst_w, w_err);
      ok = ok && g_err < 0.05 && w_err < 0.10;
      // blue detuning (delta < 0) anti-damps, red detuning damps
      signs_ok = signs_ok && (delta < 0.0 ? fit.gamma_eff < mech.gamma_m
                                          : fit.gamma_eff > mech.gamma_m);
    }
  }
  return {ok && signs_ok,
          "6 points: damping error " + num(worst_g) + " (tol 0.05), frequency-shift "
          "error " + num(worst_w) + " (tol 0.10), detuning sign pattern " +
              (signs_ok ? "correct" : "WRONG")};
}

// -- criterion 5 -------------------------------------------------------

Outcome crit_hopf_threshold() {
  const QubitParams qubit{0.002, 0.002, -1.0};
  const double delta = -1.0, delta_n = 1.0;
  double worst = 0.0;
  for (const double sigma : {0.0, 2e-4, -2e-4, 4e-4, -4e-4}) {
    MechanicalParams mech{1.0, 1e-3, 0.0};
    const double omega_rabi_abs =
        std::abs(derive_secondary(delta, delta_n, qubit, mech).omega_rabi);
    mech.omega_m = omega_rabi_abs + sigma;
    mech.gamma_m = mech.omega_m / 500.0;
    const DerivedParams d = derive_secondary(delta, delta_n, qubit, mech);
    const double gca = g_crit_analytic(d, mech);
    const EomParams base{delta,        delta_n,      qubit.gamma1, qubit.gamma2,
                         qubit.sigma_z_eq, mech.omega_m, mech.gamma_m, 0.0};
    const HopfPoint hp =
        hopf_threshold(base, 0.5 * gca, 2.0 * gca, equilibrium_guess(base));
    worst = std::max(worst, std::abs(hp.g - gca) / gca);
  }
  return {worst < 0.05, "threshold error " + num(worst) +
                            " across 5 detunings sigma in [-0.2, 0.2]*gamma2n "
                            "(tol 0.05)"};
}

// -- criteria 6 and 7 share the cycle-measurement pattern ---------------

Outcome crit_cycle_scaling() {
  const QubitParams qubit{0.002, 0.002, -1.0};
  const double delta = -1.0, delta_n = 1.0;
  MechanicalParams mech{1.0, 0.0, 0.0};
  mech.omega_m = std::abs(derive_secondary(delta, delta_n, qubit, mech).omega_rabi);
  mech.gamma_m = mech.omega_m / 50.0; // sigma = 0, moderate mechanical linewidth
  const DerivedParams d = derive_secondary(delta, delta_n, qubit, mech);
  const double gca = g_crit_analytic(d, mech);
  const EomParams base{delta,        delta_n,      qubit.gamma1, qubit.gamma2,
                       qubit.sigma_z_eq, mech.omega_m, mech.gamma_m, 0.0};
  const double gcn =
      hopf_threshold(base, 0.5 * gca, 2.0 * gca, equilibrium_guess(base)).g;

  const double ratios[6] = {1.10, 1.08, 1.06, 1.04, 1.02, 1.01}; // descending, warm starts
  std::vector<double> lx, ly;
  double worst_amp = 0.0, worst_sz = 0.0;
  SystemState seed;
  bool have_seed = false;
  for (const double r : ratios) {
    EomParams p = base;
    p.g = r * gcn;
    const EquilibriumPoint eq = find_equilibrium(p, equilibrium_guess(p));
    SystemState s0 = have_seed ? seed : eq.state;
    if (!have_seed) s0.alpha += 0.03;
    // the cycle envelope relaxes at the Hopf growth rate mu, which shrinks
    // toward onset; settle for a fixed multiple of 1/mu before measuring so
    // near-threshold amplitudes are not biased by the slow transient
    // (0.217 is the growth-rate prefactor measured for this parameter set)
    const double mu = 0.5 * mech.gamma_m * (r * r - 1.0) * 0.217;
    const double t_settle = (have_seed ? 8.0 : 18.0) / mu;
    const Trajectory relax =
        integrate(s0, p, 0.0, t_settle, 1e-10, 1e-12, t_settle / 64.0);
    const SteadyState ss = steady_state(p, relax.states.back(), 4e4);
    if (ss.kind != SteadyStateKind::limit_cycle || !ss.cycle.converged)
      return {false, "no converged limit cycle at g/g_c = " + num(r)};
    seed = ss.state;
    have_seed = true;

    lx.push_back(std::log(r * r - 1.0)); // = log(g^2/g_c^2 - 1) on the numeric threshold
    ly.push_back(std::log(ss.cycle.amp_alpha));

    const LimitCyclePrediction lp = limit_cycle_prediction(d, mech, p.g);
    worst_amp = std::max(worst_amp, std::abs(ss.cycle.amp_alpha - lp.r_a) / lp.r_a);

    // mean inversion in the diagonal (dressed) basis over 40 cycle periods
    const double period = 2.0 * kPi / ss.cycle.freq;
    const Trajectory tr =
        integrate(ss.state, p, 0.0, 40.0 * period, 1e-11, 1e-13, period / 128.0);
    const double inv_norm = 1.0 / std::abs(d.omega_rabi);
    auto diag_sz = [&](const SystemState& s) {
      return (delta * s.s_z + delta_n * 2.0 * s.s_minus.real()) * inv_norm;
    };
    double acc = 0.0;
    for (std::size_t k = 1; k < tr.times.size(); ++k)
      acc += 0.5 * (diag_sz(tr.states[k]) + diag_sz(tr.states[k - 1])) *
             (tr.times[k] - tr.times[k - 1]);
    const double mean_diag = acc / (tr.times.back() - tr.times.front());
    const double shift = mean_diag - d.s_z_eq_bar;
    worst_sz = std::max(worst_sz, std::abs(shift - lp.s_cz) / std::abs(lp.s_cz));
  }
  const LineFit f = fit_line(lx, ly);
  const bool ok =
      std::abs(f.slope - 0.5) <= 0.05 && worst_amp < 0.15 && worst_sz < 0.25;
  return {ok, "amplitude slope " + num(f.slope) + " (target 0.5 +- 0.05), amplitude "
              "error " + num(worst_amp) + " (tol 0.15), inversion-shift error " +
                  num(worst_sz) + " (tol 0.25)"};
}

Outcome crit_cycle_frequency() {
  const QubitParams qubit{0.02, 0.02, -1.0};
  const double delta = -1.0, delta_n = 1.0;
  std::vector<double> sig, shift;
  for (const double s : {-0.06, -0.03, 0.0, 0.03, 0.06}) { // |sigma| <= 0.05*omega_m
    MechanicalParams mech{1.0, 0.01, 0.0};
    const double omega_rabi_abs =
        std::abs(derive_secondary(delta, delta_n, qubit, mech).omega_rabi);
    mech.omega_m = omega_rabi_abs + s;
    const DerivedParams d = derive_secondary(delta, delta_n, qubit, mech);
    mech.g = 1.3 * g_crit_analytic(d, mech);
    const EomParams p{delta,        delta_n,      qubit.gamma1, qubit.gamma2,
                      qubit.sigma_z_eq, mech.omega_m, mech.gamma_m, mech.g};
    SystemState s0 = find_equilibrium(p, equilibrium_guess(p)).state;
    s0.alpha += 0.1;
    const SteadyState ss = steady_state(p, s0, 5e4);
    if (ss.kind != SteadyStateKind::limit_cycle || !ss.cycle.converged)
      return {false, "no converged limit cycle at sigma = " + num(s)};
    sig.push_back(s);
    shift.push_back(ss.cycle.freq - mech.omega_m);
  }
  const LineFit f = fit_line(sig, shift);
  return {f.r2 > 0.95, "cycle frequency shift vs sigma: R^2 " + num(f.r2) +
                           " (tol > 0.95), slope " + num(f.slope) +
                           " over 5 detunings"};
}

// -- criterion 8 -------------------------------------------------------

Outcome crit_flux_map() {
  ModelConfig cfg;
  cfg.drive = {0.0, 0.0, 1.0, 0, 0.1};
  cfg.qubit = {0.014, 0.714, -1.0};
  cfg.mech = {0.128, 0.128 / 1e5, 0.0018};

  // phi_e0 points sit at odd multiples of 1/32 so every pixel lies strictly
  // inside one resonance window and has an exact mirror partner in-grid
  FluxGridSpec spec;
  spec.phi_e0_min = -15.0 / 32.0;
  spec.phi_e0_max = 3.0 + 15.0 / 32.0;
  spec.phi_e0_count = 64;
  spec.phi_e1_min = 0.0;
  spec.phi_e1_max = 12.5;
  spec.phi_e1_count = 126; // cell size 0.1
  spec.n_max = 3;
  const MapTile tile = damping_map(spec, cfg);
  const std::size_t nx = tile.x.size();
  const std::size_t ny = tile.y.size();

  const double floor =
      1e-12 * std::max(std::abs(tile.min_value), std::abs(tile.max_value));
  long above = 0, flipped = 0;
  for (std::size_t ix = 0; ix < nx; ++ix) {
    const long n = std::lround(tile.x[ix]);
    const std::size_t mx = static_cast<std::size_t>(32 * n + 15 - static_cast<long>(ix));
    for (std::size_t iy = 0; iy < ny; ++iy) {
      const double v = tile.at(ix, iy);
      if (std::abs(v) <= floor) continue;
      ++above;
      const double vm = tile.at(mx, iy);
      if ((v > 0.0 && vm < 0.0) || (v < 0.0 && vm > 0.0)) ++flipped;
    }
  }
  const double frac = above > 0 ? static_cast<double>(flipped) / above : 0.0;

  // first zeros of the Bessel functions J_0 .. J_3, computed independently
  const std::vector<std::vector<double>> zeros = {
      {2.4048255576957728, 5.5200781102863106, 8.6537279129110122, 11.791534439014282},
      {3.8317059702075123, 7.0155866698156188, 10.173468135062722},
      {5.1356223018406826, 8.4172441403998649, 11.619841172149059},
      {6.3801618959239835, 9.7610231299816697}};
  const double cell = tile.y[1] - tile.y[0];
  double worst_dist = 0.0, worst_contrast = 0.0;
  bool nulls_ok = true;
  for (int n = 0; n <= 3; ++n) {
    const std::size_t ix = static_cast<std::size_t>(16 * n + 12); // mid-lobe row
    for (const double z : zeros[static_cast<std::size_t>(n)]) {
      std::size_t j_lo = 0, j_hi = ny - 1;
      while (tile.y[j_lo] < z - 1.0) ++j_lo;
      while (tile.y[j_hi] > z + 1.0) --j_hi;
      std::size_t j_min = j_lo;
      double v_min = std::abs(tile.at(ix, j_lo)), v_max = v_min;
      for (std::size_t j = j_lo; j <= j_hi; ++j) {
        const double v = std::abs(tile.at(ix, j));
        if (v < v_min) {
          v_min = v;
          j_min = j;
        }
        v_max = std::max(v_max, v);
      }
      const double dist = std::abs(tile.y[j_min] - z);
      const double contrast = v_max > 0.0 ? v_min / v_max : 1.0;
      worst_dist = std::max(worst_dist, dist);
      worst_contrast = std::max(worst_contrast, contrast);
      nulls_ok = nulls_ok && dist <= cell + 1e-9 && contrast < 0.05;
    }
  }
  return {frac >= 0.99 && nulls_ok,
          "sign antisymmetry on " + num(100.0 * frac) + "% of " + std::to_string(above) +
              " above-floor pixels (tol >= 99%); 13 nulls within " + num(worst_dist) +
              " of the Bessel zeros (tol " + num(cell) + ")"};
}

// -- criterion 9 -------------------------------------------------------

Outcome crit_branch_structure() {
  const QubitParams qubit{0.002, 0.002, -1.0};
  const double delta = -0.1, delta_n = 0.1; // |Omega_R| = 0.1414, omega_m = 1.1*that
  MechanicalParams mech{1.0, 0.0, 0.0};
  const double omega_rabi_abs =
      std::abs(derive_secondary(delta, delta_n, qubit, mech).omega_rabi);
  mech.omega_m = 1.1 * omega_rabi_abs;
  mech.gamma_m = mech.omega_m / 30.0;
  const DerivedParams d = derive_secondary(delta, delta_n, qubit, mech);
  const double gca = g_crit_analytic(d, mech);
  const EomParams base{delta,        delta_n,      qubit.gamma1, qubit.gamma2,
                       qubit.sigma_z_eq, mech.omega_m, mech.gamma_m, 0.0};
  const SystemState guess = equilibrium_guess(base);
  const double gh = hopf_threshold(base, 0.3 * gca, 3.0 * gca, guess).g;

  std::vector<double> grid;
  for (const double r : {0.6, 0.85, 1.05, 1.3, 1.6}) grid.push_back(r * gh);
  const BranchData branch = continuation_sweep(base, grid, guess, 2.5e5);
  if (branch.truncated) return {false, "sweep truncated: " + branch.diagnostic};

  int flips = 0;
  std::size_t i_flip = 0, i_onset = branch.points.size();
  for (std::size_t i = 0; i + 1 < branch.points.size(); ++i)
    if (branch.points[i].eq.stable != branch.points[i + 1].eq.stable) {
      ++flips;
      i_flip = i + 1;
    }
  for (std::size_t i = 0; i < branch.points.size(); ++i)
    if (branch.points[i].has_cycle && branch.points[i].cycle.converged &&
        branch.points[i].cycle.amp_alpha > 0.01) {
      i_onset = i;
      break;
    }
  const bool ok = flips == 1 && i_onset < branch.points.size() &&
                  (i_onset > i_flip ? i_onset - i_flip : i_flip - i_onset) <= 1;
  return {ok, "branch at omega_m = 1.1*|Omega_R|: " + std::to_string(flips) +
                  " stability change(s) at grid index " + std::to_string(i_flip) +
                  ", cycle onset at index " +
                  (i_onset < branch.points.size() ? std::to_string(i_onset) : "none") +
                  " (must coincide within 1 step)"};
}

// -- criterion 10 ------------------------------------------------------

Outcome crit_determinism(const std::string& cli_exe) {
  if (cli_exe.empty())
    return {false, "command-line binary path not provided to the suite"};

  namespace fs = std::filesystem;
  const fs::path root =
      fs::temp_directory_path() /
      ("fluxmech-accept-" + hex64(fnv1a64(cli_exe)).substr(0, 8) + "-" +
       std::to_string(static_cast<unsigned long>(
           std::chrono::steady_clock::now().time_since_epoch().count() & 0xFFFFFF)));
  fs::create_directories(root);

  const std::string physics =
      "[drive]\neps0_phi_e0 = -1.0\neps0_phi_e1 = 0.0\ndelta_gap = 1.0\n"
      "[qubit]\ngamma1 = 0.002\ngamma2 = 0.002\n"
      "[mech]\nomega_m = 1.4142135623730951\ngamma_m = 0.002\ng = 0.004\n";
  struct Job {
    const char* command;
    std::string run_section;
  };
  const Job jobs[4] = {
      {"simulate", "[run]\nt_end = 200\nalpha_re = 0.5\n"},
      {"response", "[run]\nomega_min = 0.2\nomega_max = 2.5\nomega_count = 150\n"},
      {"bifurcate", "[run]\ng_min = 0.001\ng_max = 0.004\ng_count = 4\n"},
      {"map",
       "[run]\nphi_e0_min = -0.46875\nphi_e0_max = 0.46875\nphi_e0_count = 16\n"
       "phi_e1_min = 0\nphi_e1_max = 4\nphi_e1_count = 9\nn_max = 1\n"}};

  std::string failure;
  for (const Job& job : jobs) {
    const fs::path cfg_path = root / (std::string(job.command) + ".cfg");
    write_text_file(cfg_path.string(), physics + job.run_section);
    const fs::path dir_a = root / (std::string(job.command) + "_a");
    const fs::path dir_b = root / (std::string(job.command) + "_b");

    const std::string first = "FLUXMECH_THREADS=1 '" + cli_exe + "' " + job.command +
                              " '" + cfg_path.string() + "' --out '" + dir_a.string() +
                              "' >/dev/null 2>&1";
    if (std::system(first.c_str()) != 0) {
      failure = std::string(job.command) + " exited nonzero";
      break;
    }
    const std::string second = "FLUXMECH_THREADS=3 '" + cli_exe + "' replay '" +
                               (dir_a / "manifest.json").string() + "' --out '" +
                               dir_b.string() + "' >/dev/null 2>&1";
    if (std::system(second.c_str()) != 0) {
      failure = std::string(job.command) + " replay reported a hash mismatch";
      break;
    }
    const RunManifest m =
        manifest_from_json(read_text_file((dir_a / "manifest.json").string()));
    for (const OutputRecord& o : m.outputs)
      if (read_text_file((dir_a / o.file).string()) !=
          read_text_file((dir_b / o.file).string())) {
        failure = std::string(job.command) + "/" + o.file + " differs between runs";
        break;
      }
    if (!failure.empty()) break;
  }
  fs::remove_all(root);
  if (!failure.empty()) return {false, failure};
  return {true, "simulate/response/bifurcate/map each replayed byte-identically "
                "under 1 vs 3 workers"};
}

} // namespace

std::vector<CriterionResult> run_acceptance(std::ostream& out,
                                            const std::string& cli_exe) {
  struct Entry {
    const char* label;
    std::function<Outcome()> fn;
  };
  const Entry entries[10] = {
      {"analytic Jacobian vs central finite differences", crit_jacobian},
      {"Bloch-norm conservation without qubit decay", crit_conservation},
      {"driven-qubit response oracle vs closed form", crit_response_oracle},
      {"ring-down damping and frequency shift vs renormalized oscillator",
       crit_ringdown},
      {"numeric Hopf threshold vs critical-coupling formula", crit_hopf_threshold},
      {"limit-cycle amplitude scaling above threshold", crit_cycle_scaling},
      {"cycle frequency shift linear in oscillator detuning", crit_cycle_frequency},
      {"flux-map antisymmetry and Bessel-ladder nulls", crit_flux_map},
      {"single Hopf point coinciding with cycle onset on the branch",
       crit_branch_structure},
      {"byte-identical replay across worker counts",
       [&cli_exe] { return crit_determinism(cli_exe); }}};

  std::vector<CriterionResult> results;
  results.reserve(10);
  for (int i = 0; i < 10; ++i) {
    CriterionResult r;
    r.index = i + 1;
    r.label = entries[i].label;
    try {
      const Outcome o = entries[i].fn();
      r.passed = o.ok;
      r.detail = o.detail;
    } catch (const std::exception& e) {
      r.passed = false;
      r.detail = std::string("exception: ") + e.what();
    }
    out << (r.passed ? "PASS" : "FAIL") << " [" << std::setw(2) << r.index << "/10] "
        << r.label << ": " << r.detail << "\n";
    out.flush();
    results.push_back(std::move(r));
  }
  return results;
}

bool all_passed(const std::vector<CriterionResult>& results) {
  for (const CriterionResult& r : results)
    if (!r.passed) return false;
  return true;
}

} // namespace fluxmech
