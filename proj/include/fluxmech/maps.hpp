#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "fluxmech/types.hpp"

namespace fluxmech {

/// Rectangular flux grid: phi_e0 spans the detuning axis, phi_e1 the drive
/// amplitude axis (both as eps0*phi/hbar), with multi-photon indices
/// 0..n_max superposed.
struct FluxGridSpec {
  double phi_e0_min = 0.0;
  double phi_e0_max = 0.0;
  int phi_e0_count = 0;
  double phi_e1_min = 0.0;
  double phi_e1_max = 0.0;
  int phi_e1_count = 0;
  int n_max = 0;

  void validate() const;
};

/// One scalar field over a rectangular grid. values is row-major:
/// values[iy * x.size() + ix] belongs to (x[ix], y[iy]). min_value and
/// max_value record the extrema so presentation scaling stays a separate
/// step from the physics.
struct MapTile {
  std::vector<double> x;
  std::vector<double> y;
  std::vector<double> values;
  std::string x_label;
  std::string y_label;
  std::string value_label;
  double min_value = 0.0;
  double max_value = 0.0;

  [[nodiscard]] double at(std::size_t ix, std::size_t iy) const {
    return values[iy * x.size() + ix];
  }
};

/// The three presentation layers of the response over a (delta, omega)
/// grid: magnitude, phase, and imaginary part.
struct ResponseSurface {
  MapTile abs_chi;
  MapTile arg_chi;
  MapTile im_chi;
};

/// Mechanical damping correction gamma_m_tilde - gamma_m over the flux
/// grid. At each point the multi-photon index n in 0..n_max whose
/// rotating-frame detuning delta_n = phi_e0 - n*omega_d falls in the
/// half-open nearest-resonance window (-omega_d/2, omega_d/2] contributes
/// its correction; outside every window the value is zero. delta_gap and
/// omega_d come from base.drive, rates from base.qubit, the oscillator
/// from base.mech. Rows evaluate in parallel; the result is independent
/// of the worker count.
[[nodiscard]] MapTile damping_map(const FluxGridSpec& spec, const ModelConfig& base);

/// Tabulates chi_z over a (delta, omega) grid at fixed dressed gap
/// delta_n. Grids must be nonempty and strictly increasing.
[[nodiscard]] ResponseSurface response_surface(const std::vector<double>& delta_grid,
                                               const std::vector<double>& omega_grid,
                                               double delta_n, const QubitParams& qubit,
                                               const MechanicalParams& mech);

/// Writes `x,y,value` rows (%.17g) in row-major order.
void write_map_csv(std::ostream& os, const MapTile& tile);

} // namespace fluxmech
