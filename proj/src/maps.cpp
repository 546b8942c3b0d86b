#include "fluxmech/maps.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ostream>

#include "fluxmech/bessel.hpp"
#include "fluxmech/model.hpp"
#include "fluxmech/response.hpp"
#include "fluxmech/threads.hpp"

namespace fluxmech {
namespace {

std::vector<double> linspace(double lo, double hi, int count) {
  std::vector<double> v(count);
  for (int i = 0; i < count; ++i)
    v[i] = lo + (i * (hi - lo)) / (count - 1);
  return v;
}

void record_extrema(MapTile& tile) {
  auto [lo, hi] = std::minmax_element(tile.values.begin(), tile.values.end());
  tile.min_value = *lo;
  tile.max_value = *hi;
}

} // namespace

void FluxGridSpec::validate() const {
  if (!std::isfinite(phi_e0_min) || !std::isfinite(phi_e0_max) ||
      !std::isfinite(phi_e1_min) || !std::isfinite(phi_e1_max))
    throw config_error("FluxGridSpec: non-finite range");
  if (phi_e0_count < 2 || phi_e1_count < 2)
    throw config_error("FluxGridSpec: axis counts must be >= 2");
  if (!(phi_e0_max > phi_e0_min) || !(phi_e1_max > phi_e1_min))
    throw config_error("FluxGridSpec: ranges must have positive extent");
  if (n_max < 0) throw config_error("FluxGridSpec: n_max must be >= 0");
}

MapTile damping_map(const FluxGridSpec& spec, const ModelConfig& base) {
  spec.validate();
  base.validate();

  const double wd = base.drive.omega_drive;
  const double gap = base.drive.delta_gap;
  const QubitParams& qubit = base.qubit;
  const MechanicalParams& mech = base.mech;

  MapTile tile;
  tile.x = linspace(spec.phi_e0_min, spec.phi_e0_max, spec.phi_e0_count);
  tile.y = linspace(spec.phi_e1_min, spec.phi_e1_max, spec.phi_e1_count);
  tile.values.assign(tile.x.size() * tile.y.size(), 0.0);
  tile.x_label = "phi_e0";
  tile.y_label = "phi_e1";
  tile.value_label = "delta_gamma_m";

  const std::size_t nx = tile.x.size();
  parallel_for(tile.y.size(), [&](std::size_t iy) {
    for (std::size_t ix = 0; ix < nx; ++ix) {
      double sum = 0.0;
      for (int n = 0; n <= spec.n_max; ++n) {
        const double delta_n = tile.x[ix] - n * wd;
        // half-open nearest-resonance window; ties go to the lower n
        if (!(delta_n > -0.5 * wd && delta_n <= 0.5 * wd)) continue;
        const double gap_n = gap * bessel_jn(n, tile.y[iy] / wd);
        if (delta_n == 0.0 && gap_n == 0.0) continue; // no dressed qubit left
        DerivedParams d = derive_secondary(delta_n, gap_n, qubit, mech);
        sum += -mech.g * chi_z(mech.omega_m, d).imag();
      }
      tile.values[iy * nx + ix] = sum;
    }
  });

  record_extrema(tile);
  return tile;
}

ResponseSurface response_surface(const std::vector<double>& delta_grid,
                                 const std::vector<double>& omega_grid,
                                 double delta_n, const QubitParams& qubit,
                                 const MechanicalParams& mech) {
  if (delta_grid.empty() || omega_grid.empty())
    throw config_error("response_surface: empty grid");
  for (std::size_t i = 1; i < delta_grid.size(); ++i)
    if (!(delta_grid[i] > delta_grid[i - 1]))
      throw config_error("response_surface: delta grid must increase strictly");
  for (std::size_t i = 1; i < omega_grid.size(); ++i)
    if (!(omega_grid[i] > omega_grid[i - 1]))
      throw config_error("response_surface: omega grid must increase strictly");
  if (!std::isfinite(delta_n))
    throw config_error("response_surface: non-finite delta_n");
  qubit.validate();
  mech.validate();

  ResponseSurface surf;
  for (MapTile* tile : {&surf.abs_chi, &surf.arg_chi, &surf.im_chi}) {
    tile->x = delta_grid;
    tile->y = omega_grid;
    tile->values.assign(delta_grid.size() * omega_grid.size(), 0.0);
    tile->x_label = "delta";
    tile->y_label = "omega";
  }
  surf.abs_chi.value_label = "abs_chi";
  surf.arg_chi.value_label = "arg_chi";
  surf.im_chi.value_label = "im_chi";

  const std::size_t nx = delta_grid.size();
  parallel_for(omega_grid.size(), [&](std::size_t iy) {
    for (std::size_t ix = 0; ix < nx; ++ix) {
      DerivedParams d = derive_secondary(delta_grid[ix], delta_n, qubit, mech);
      complexd chi = chi_z(omega_grid[iy], d);
      const double mag = std::abs(chi);
      // signed zeros would otherwise make atan2 report pi for a null response
      surf.abs_chi.values[iy * nx + ix] = mag;
      surf.arg_chi.values[iy * nx + ix] =
          mag == 0.0 ? 0.0 : std::atan2(chi.imag(), chi.real());
      surf.im_chi.values[iy * nx + ix] = chi.imag();
    }
  });

  record_extrema(surf.abs_chi);
  record_extrema(surf.arg_chi);
  record_extrema(surf.im_chi);
  return surf;
}

void write_map_csv(std::ostream& os, const MapTile& tile) {
  os << tile.x_label << ',' << tile.y_label << ',' << tile.value_label << '\n';
  char buf[96];
  for (std::size_t iy = 0; iy < tile.y.size(); ++iy)
    for (std::size_t ix = 0; ix < tile.x.size(); ++ix) {
      std::snprintf(buf, sizeof(buf), "%.17g,%.17g,%.17g\n", tile.x[ix],
                    tile.y[iy], tile.at(ix, iy));
      os << buf;
    }
}

} // namespace fluxmech
