#include "fluxmech/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <numbers>
#include <ostream>

namespace fluxmech {
namespace {

constexpr double two_pi = 2.0 * std::numbers::pi;

// Length of the uniformly spaced prefix (the final sample may sit off-grid
// because t1 is always emitted) and the grid spacing.
std::pair<std::size_t, double> uniform_prefix(const std::vector<double>& t) {
  if (t.size() < 2) return {t.size(), 0.0};
  double dt = t[1] - t[0];
  std::size_t n = 2;
  while (n < t.size() && std::abs((t[n] - t[n - 1]) - dt) <= 1e-9 * dt) ++n;
  return {n, dt};
}

struct LineFit {
  double slope = 0.0;
  double intercept = 0.0;
  double rms = 0.0;
};

LineFit fit_line(const std::vector<double>& x, const std::vector<double>& y) {
  const std::size_t n = x.size();
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= static_cast<double>(n);
  my /= static_cast<double>(n);
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
  }
  LineFit f;
  f.slope = sxx > 0.0 ? sxy / sxx : 0.0;
  f.intercept = my - f.slope * mx;
  double ss = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    double r = y[i] - (f.intercept + f.slope * x[i]);
    ss += r * r;
  }
  f.rms = std::sqrt(ss / static_cast<double>(n));
  return f;
}

// Amplitude-weighted mean rotation rate of a complex signal on a uniform
// grid: arg of the averaged one-step correlation, signed.
double rotation_rate(const std::vector<complexd>& d, double dt) {
  complexd acc{0.0, 0.0};
  for (std::size_t k = 0; k + 1 < d.size(); ++k) acc += d[k + 1] * std::conj(d[k]);
  if (std::abs(acc) == 0.0) return 0.0;
  return std::arg(acc) / dt;
}

// Weighted least-squares slope of y against x.
double fit_slope_weighted(const std::vector<double>& x, const std::vector<double>& y,
                          const std::vector<double>& w) {
  double sw = 0.0, mx = 0.0, my = 0.0;
  const std::size_t n = x.size();
  for (std::size_t i = 0; i < n; ++i) {
    sw += w[i];
    mx += w[i] * x[i];
    my += w[i] * y[i];
  }
  if (sw <= 0.0) return 0.0;
  mx /= sw;
  my /= sw;
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    sxx += w[i] * (x[i] - mx) * (x[i] - mx);
    sxy += w[i] * (x[i] - mx) * (y[i] - my);
  }
  return sxx > 0.0 ? sxy / sxx : 0.0;
}

// Refines a signed rotation rate by regressing the unwrapped phase of the
// demodulated signal against time over [i0, i1], weighted by |d|^2 so the
// quiet end of a decay cannot dominate the fit.
double refine_rate(const std::vector<double>& t, const std::vector<complexd>& d,
                   double rate, std::size_t i0, std::size_t i1) {
  for (int iter = 0; iter < 2; ++iter) {
    std::vector<double> ts, ph, w;
    ts.reserve(i1 - i0 + 1);
    ph.reserve(i1 - i0 + 1);
    w.reserve(i1 - i0 + 1);
    double acc = 0.0;
    complexd zprev{0.0, 0.0};
    for (std::size_t k = i0; k <= i1; ++k) {
      complexd z = d[k] * std::polar(1.0, -rate * t[k]);
      if (k > i0) acc += std::arg(z * std::conj(zprev));
      zprev = z;
      ts.push_back(t[k]);
      ph.push_back(acc);
      w.push_back(std::norm(z));
    }
    rate += fit_slope_weighted(ts, ph, w);
  }
  return rate;
}

std::vector<complexd> alpha_series(const Trajectory& traj, std::size_t n) {
  std::vector<complexd> a(n);
  for (std::size_t k = 0; k < n; ++k) a[k] = traj.states[k].alpha;
  return a;
}

complexd mean_of(const std::vector<complexd>& v, std::size_t i0, std::size_t i1) {
  complexd m{0.0, 0.0};
  for (std::size_t k = i0; k < i1; ++k) m += v[k];
  return m / static_cast<double>(i1 - i0);
}

// Per-channel oscillation measurement in a window: centered signal, cycle
// segmentation by upward zero crossings of the real quadrature, half
// peak-to-peak amplitude per cycle, rotation rate by phase regression.
struct ChannelMeasure {
  double amp = 0.0;       // averaged per-cycle half peak-to-peak of Re(d)
  double freq = 0.0;      // |rotation rate|
  double variation = 1.0; // relative spread of per-cycle amplitudes
  double max_excursion = 0.0;
  std::size_t n_cycles = 0;
};

ChannelMeasure measure_channel(const std::vector<double>& t,
                               const std::vector<complexd>& sig, double dt) {
  const std::size_t n = sig.size();
  complexd mean = mean_of(sig, 0, n);
  std::vector<complexd> d(n);
  double maxd = 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    d[k] = sig[k] - mean;
    maxd = std::max(maxd, std::abs(d[k]));
  }

  ChannelMeasure m;
  m.max_excursion = maxd;
  if (maxd == 0.0) {
    m.freq = two_pi / (t.back() - t.front()); // degenerate constant input
    m.variation = 0.0;
    return m;
  }

  double rate = rotation_rate(d, dt);
  if (rate != 0.0) rate = refine_rate(t, d, rate, 0, n - 1);
  m.freq = std::abs(rate);

  // upward zero crossings of Re(d), linearly interpolated
  std::vector<double> cross;
  std::vector<std::size_t> cross_idx;
  for (std::size_t k = 0; k + 1 < n; ++k) {
    double a = d[k].real(), b = d[k + 1].real();
    if (a < 0.0 && b >= 0.0) {
      double frac = a / (a - b);
      cross.push_back(t[k] + frac * dt);
      cross_idx.push_back(k);
    }
  }

  if (cross.size() < 3) {
    // best effort: one global half peak-to-peak, no cycle statistics
    double lo = d[0].real(), hi = d[0].real();
    for (const auto& v : d) {
      lo = std::min(lo, v.real());
      hi = std::max(hi, v.real());
    }
    m.amp = 0.5 * (hi - lo);
    return m;
  }

  // three-point parabolic refinement removes the O(dphi^2) sampling bias
  auto refined = [&d, n](std::size_t k) {
    double fk = d[k].real();
    if (k == 0 || k + 1 >= n) return fk;
    double fm = d[k - 1].real(), fp = d[k + 1].real();
    double curv = fp - 2.0 * fk + fm;
    if (curv == 0.0) return fk;
    double num = fp - fm;
    return fk - num * num / (8.0 * curv);
  };

  std::vector<double> cyc_amp;
  cyc_amp.reserve(cross.size());
  for (std::size_t j = 0; j + 1 < cross_idx.size(); ++j) {
    std::size_t klo = cross_idx[j] + 1, khi = klo;
    for (std::size_t k = cross_idx[j] + 1; k <= cross_idx[j + 1]; ++k) {
      if (d[k].real() < d[klo].real()) klo = k;
      if (d[k].real() > d[khi].real()) khi = k;
    }
    cyc_amp.push_back(0.5 * (refined(khi) - refined(klo)));
  }
  m.n_cycles = cyc_amp.size();

  double amin = cyc_amp[0], amax = cyc_amp[0], asum = 0.0;
  for (double a : cyc_amp) {
    amin = std::min(amin, a);
    amax = std::max(amax, a);
    asum += a;
  }
  m.amp = asum / static_cast<double>(cyc_amp.size());
  m.variation = m.amp > 0.0 ? (amax - amin) / m.amp : 0.0;

  // crossings give a robust frequency when phase regression degenerates
  if (m.freq == 0.0)
    m.freq = two_pi * static_cast<double>(cross.size() - 1) /
             (cross.back() - cross.front());
  return m;
}

} // namespace

double default_sample_dt(const EomParams& params) {
  double fastest = std::max(params.omega_m, std::hypot(params.delta, params.delta_n));
  if (!(fastest > 0.0))
    throw config_error("default_sample_dt: no positive characteristic frequency");
  return two_pi / fastest / 32.0;
}

Trajectory integrate(const SystemState& state0, const EomParams& params, double t0,
                     double t1, double rel_tol, double abs_tol, double sample_dt,
                     OdeScheme scheme) {
  if (!(t1 > t0)) throw config_error("integrate: t1 must exceed t0");
  if (!(rel_tol > 0.0) || rel_tol > 1e-2 || !(abs_tol > 0.0) || abs_tol > 1e-2)
    throw config_error("integrate: tolerances must lie in (0, 1e-2]");
  for (double v : state0.to_array())
    if (!std::isfinite(v)) throw config_error("integrate: non-finite initial state");
  if (sample_dt <= 0.0) sample_dt = default_sample_dt(params);

  Trajectory traj;
  traj.times.reserve(static_cast<std::size_t>((t1 - t0) / sample_dt) + 2);
  traj.states.reserve(traj.times.capacity());

  auto rhs = [&params](double, const std::array<double, 5>& y,
                       std::array<double, 5>& dydt) { eom_rhs(y, dydt, params); };
  auto observe = [&traj](double t, const std::array<double, 5>& y) {
    traj.times.push_back(t);
    traj.states.push_back(SystemState::from_array(y));
  };

  OdeOptions opt;
  opt.rel_tol = rel_tol;
  opt.abs_tol = abs_tol;
  opt.scheme = scheme;

  std::array<double, 5> y = state0.to_array();
  try {
    if (params.gamma1 == 0.0 && params.gamma2 == 0.0) {
      // decoherence-free evolution conserves 4|s_-|^2 + s_z^2; project each
      // accepted state back onto that sphere so the drift cannot accumulate
      const double norm0 = bloch_norm(state0);
      auto project = [norm0](std::array<double, 5>& v) {
        double nrm = 4.0 * (v[0] * v[0] + v[1] * v[1]) + v[2] * v[2];
        if (nrm > 0.0) {
          double lam = std::sqrt(norm0 / nrm);
          v[0] *= lam;
          v[1] *= lam;
          v[2] *= lam;
        }
      };
      traj.stats = integrate_dense<5>(rhs, y, t0, t1, sample_dt, observe, opt,
                                      project);
    } else {
      traj.stats = integrate_dense<5>(rhs, y, t0, t1, sample_dt, observe, opt);
    }
  } catch (const ode_failure& e) {
    traj.stats = e.stats();
    throw integration_failure(e.what(), std::move(traj));
  }
  return traj;
}

RingdownFit ringdown_fit(const Trajectory& traj) {
  auto [n, dt] = uniform_prefix(traj.times);
  if (n < 64 || dt <= 0.0)
    throw numeric_error("ringdown_fit: trajectory too short for a fit");
  std::vector<complexd> a = alpha_series(traj, n);
  const std::vector<double>& t = traj.times;

  // Asymptotic offset: start from the global mean, refine over a trailing
  // window of integer periods (the oscillation averages out), then refine
  // again by subtracting the fitted exponential model.
  complexd baseline = mean_of(a, 0, n);
  std::vector<complexd> d(n);

  auto center = [&](complexd b) {
    double maxd = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
      d[k] = a[k] - b;
      maxd = std::max(maxd, std::abs(d[k]));
    }
    if (maxd < 1e-12 * (1.0 + std::abs(b)))
      throw numeric_error("ringdown_fit: signal is non-oscillatory");
    return maxd;
  };

  double maxd = center(baseline);
  double rate = rotation_rate(d, dt);
  if (rate == 0.0) throw numeric_error("ringdown_fit: signal is non-oscillatory");

  double period = two_pi / std::abs(rate);
  double span = t[n - 1] - t[0];
  double n_periods = span / period;
  if (n_periods < 50.0)
    throw numeric_error("ringdown_fit: needs >= 50 oscillation periods, got " +
                        std::to_string(n_periods));

  // pass 0 refinement: mean over trailing integer-period window
  std::size_t m_tail = std::max<std::size_t>(
      1, static_cast<std::size_t>(std::floor(n_periods / 4.0)));
  double t_win = static_cast<double>(m_tail) * period;
  std::size_t k0 = 0;
  while (k0 + 1 < n && t[k0] < t[n - 1] - t_win) ++k0;
  baseline = mean_of(a, k0, n);

  LineFit env_best;
  double rate_best = rate;
  double rms_best = std::numeric_limits<double>::infinity();
  for (int pass = 0; pass < 3; ++pass) {
    maxd = center(baseline);
    rate = rotation_rate(d, dt);

    // usable contiguous run around the loudest sample (the tail of a decay
    // or the head of a growth drops below the floor)
    const double floor_amp = 1e-8 * maxd;
    std::size_t imax = 0;
    for (std::size_t k = 1; k < n; ++k)
      if (std::abs(d[k]) > std::abs(d[imax])) imax = k;
    std::size_t i0 = imax, i1 = imax;
    while (i0 > 0 && std::abs(d[i0 - 1]) >= floor_amp) --i0;
    while (i1 + 1 < n && std::abs(d[i1 + 1]) >= floor_amp) ++i1;
    if (i1 - i0 + 1 < 32) {
      if (pass == 0)
        throw numeric_error("ringdown_fit: too few usable samples above the noise floor");
      break; // a refinement made things worse; keep the best pass
    }

    std::vector<double> ts, loge;
    ts.reserve(i1 - i0 + 1);
    loge.reserve(i1 - i0 + 1);
    for (std::size_t k = i0; k <= i1; ++k) {
      ts.push_back(t[k]);
      loge.push_back(std::log(std::abs(d[k])));
    }
    LineFit env = fit_line(ts, loge);
    rate = refine_rate(t, d, rate, i0, i1);
    if (std::isfinite(env.rms) && env.rms < rms_best) {
      rms_best = env.rms;
      env_best = env;
      rate_best = rate;
    }
    if (pass == 2) break;

    // subtract the fitted exponential and re-estimate the offset over a
    // window of integer periods on the quiet side, where the model is
    // smallest and its misfit cannot contaminate the mean
    complexd s{env.slope, rate};
    complexd num{0.0, 0.0};
    double den = 0.0;
    for (std::size_t k = i0; k <= i1; ++k) {
      complexd mdl = std::exp(s * t[k]);
      num += d[k] * std::conj(mdl);
      den += std::norm(mdl);
    }
    complexd amp = num / den;
    double t_quiet = std::max(1.0, std::floor(n_periods / 4.0)) * two_pi / std::abs(rate);
    complexd resid{0.0, 0.0};
    std::size_t n_quiet = 0;
    for (std::size_t k = 0; k < n; ++k) {
      bool quiet = env.slope <= 0.0 ? t[k] >= t[n - 1] - t_quiet : t[k] <= t[0] + t_quiet;
      if (!quiet) continue;
      resid += a[k] - (baseline + amp * std::exp(s * t[k]));
      ++n_quiet;
    }
    if (n_quiet == 0) break;
    baseline += resid / static_cast<double>(n_quiet);
  }

  RingdownFit fit;
  fit.gamma_eff = -2.0 * env_best.slope; // |alpha| ~ exp(-gamma t / 2)
  fit.omega_eff = std::abs(rate_best);
  fit.residual = env_best.rms;
  return fit;
}

LimitCycleMeasurement limit_cycle_measure(const Trajectory& traj,
                                          double transient_fraction) {
  if (!(transient_fraction >= 0.0) || transient_fraction >= 1.0)
    throw config_error("limit_cycle_measure: transient_fraction must lie in [0, 1)");
  auto [n, dt] = uniform_prefix(traj.times);
  if (n < 16 || dt <= 0.0)
    throw numeric_error("limit_cycle_measure: trajectory too short");

  double t_start = traj.times[0] + transient_fraction * (traj.times[n - 1] - traj.times[0]);
  std::size_t k0 = 0;
  while (k0 + 1 < n && traj.times[k0] < t_start) ++k0;
  std::size_t m = n - k0;
  if (m < 16) throw numeric_error("limit_cycle_measure: analysis window too short");

  std::vector<double> tw(m);
  std::vector<complexd> aw(m), sw(m);
  double sz_sum = 0.0;
  for (std::size_t k = 0; k < m; ++k) {
    tw[k] = traj.times[k0 + k];
    aw[k] = traj.states[k0 + k].alpha;
    sw[k] = traj.states[k0 + k].s_minus;
    sz_sum += traj.states[k0 + k].s_z;
  }

  ChannelMeasure ca = measure_channel(tw, aw, dt);
  ChannelMeasure cs = measure_channel(tw, sw, dt);

  LimitCycleMeasurement out;
  out.amp_alpha = ca.amp;
  out.amp_s_minus = cs.amp;
  out.mean_s_z = sz_sum / static_cast<double>(m);
  out.freq = ca.freq;

  complexd amean = mean_of(aw, 0, m);
  double settled_floor = 1e-9 * (1.0 + std::abs(amean));
  bool settled = ca.max_excursion < settled_floor;
  bool steady = ca.n_cycles >= 2 && ca.variation < 0.01;
  out.converged = settled || steady;
  return out;
}

SteadyState steady_state(const EomParams& params, const SystemState& state0,
                         double t_budget, double rel_tol, double abs_tol) {
  if (!(t_budget > 0.0)) throw config_error("steady_state: t_budget must be > 0");
  const double t_window = 120.0 * two_pi / params.omega_m;
  const double dt = default_sample_dt(params);

  SteadyState result;
  result.state = state0;

  double var_prev = -1.0;
  int stable_windows = 0;
  SystemState s = state0;
  double elapsed = 0.0;

  while (elapsed + t_window <= t_budget * (1.0 + 1e-12)) {
    // autonomous system: each window integrates over [0, t_window]
    Trajectory w = integrate(s, params, 0.0, t_window, rel_tol, abs_tol, dt);
    s = w.states.back();
    elapsed += t_window;

    double var = 0.0, scale = 1.0;
    std::array<double, 5> lo = w.states.front().to_array();
    std::array<double, 5> hi = lo;
    for (const SystemState& st : w.states) {
      std::array<double, 5> y = st.to_array();
      for (int i = 0; i < 5; ++i) {
        lo[i] = std::min(lo[i], y[i]);
        hi[i] = std::max(hi[i], y[i]);
        scale = std::max(scale, std::abs(y[i]));
      }
    }
    for (int i = 0; i < 5; ++i) var = std::max(var, 0.5 * (hi[i] - lo[i]));

    result.state = s;
    result.t_elapsed = elapsed;

    if (var < 1e-7 * scale) {
      result.kind = SteadyStateKind::fixed_point;
      return result;
    }
    if (var_prev > 0.0 && std::abs(var / var_prev - 1.0) < 0.01) {
      if (++stable_windows >= 3) {
        result.kind = SteadyStateKind::limit_cycle;
        result.cycle = limit_cycle_measure(w, 0.0);
        return result;
      }
    } else {
      stable_windows = 0;
    }
    var_prev = var;
  }

  result.kind = SteadyStateKind::undetermined;
  return result;
}

void write_trajectory_csv(std::ostream& os, const Trajectory& traj) {
  os << "t,re_s_minus,im_s_minus,s_z,re_alpha,im_alpha\n";
  char buf[192];
  for (std::size_t k = 0; k < traj.times.size(); ++k) {
    const SystemState& s = traj.states[k];
    std::snprintf(buf, sizeof(buf), "%.17g,%.17g,%.17g,%.17g,%.17g,%.17g\n",
                  traj.times[k], s.s_minus.real(), s.s_minus.imag(), s.s_z,
                  s.alpha.real(), s.alpha.imag());
    os << buf;
  }
}

} // namespace fluxmech
