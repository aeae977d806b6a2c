#include "mlamr/state.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace mlamr {

double LayerParams::density_ratio() const {
  if (num_layers < 2 || densities.size() < 2) return 1.0;
  return densities[0] / densities[1];
}

void LayerParams::validate() const {
  if (num_layers < 1 || num_layers > kMaxLayers)
    throw std::invalid_argument("num_layers must be in [1, " + std::to_string(kMaxLayers) + "]");
  if (static_cast<int>(densities.size()) != num_layers)
    throw std::invalid_argument("densities must list one value per layer");
  for (std::size_t k = 0; k < densities.size(); ++k) {
    if (!(densities[k] > 0.0)) throw std::invalid_argument("densities must be positive");
    if (k > 0 && !(densities[k] > densities[k - 1]))
      throw std::invalid_argument("densities must increase from the top layer down");
  }
  if (!(gravity > 0.0)) throw std::invalid_argument("gravity must be positive");
  if (!(dry_tolerance > 0.0)) throw std::invalid_argument("dry_tolerance must be positive");
}

LayerParams LayerParams::single_layer(double gravity, double dry_tolerance) {
  return LayerParams{1, {1.0}, gravity, dry_tolerance};
}

LayerParams LayerParams::two_layer(double density_ratio, double gravity, double dry_tolerance) {
  return LayerParams{2, {density_ratio, 1.0}, gravity, dry_tolerance};
}

SurfaceSet surfaces_from_state(const CellState& cell) {
  SurfaceSet s;
  s.num_layers = cell.num_layers;
  double level = cell.bathy;
  for (int m = cell.num_layers - 1; m >= 0; --m) {
    level += cell.h[m];
    s.eta[m] = level;
  }
  return s;
}

double effective_bathymetry(const CellState& cell, int m) {
  double floor = cell.bathy;
  for (int n = cell.num_layers - 1; n > m; --n) floor += cell.h[n];
  return floor;
}

CellState state_from_surfaces(const SurfaceSet& surfaces, double bathy, int num_layers,
                              double /*dry_tolerance*/, LayerArray* clipped) {
  CellState cell;
  cell.num_layers = num_layers;
  cell.bathy = bathy;
  if (clipped) clipped->fill(0.0);
  double floor = bathy;
  for (int m = num_layers - 1; m >= 0; --m) {
    const double d = surfaces.eta[m] - floor;
    if (d > 0.0) {
      cell.h[m] = d;
      floor += d;
    } else {
      cell.h[m] = 0.0;
      if (clipped) (*clipped)[m] = -d;
    }
  }
  return cell;
}

bool is_wet(double h, double dry_tolerance) { return h > dry_tolerance; }

bool has_wet_prefix(const CellState& cell, double dry_tolerance) {
  bool seen_dry = false;
  for (int m = 0; m < cell.num_layers; ++m) {
    const bool wet = is_wet(cell.h[m], dry_tolerance);
    if (wet && seen_dry) return false;
    if (!wet) seen_dry = true;
  }
  return true;
}

void zero_dry_momenta(CellState& cell, double dry_tolerance) {
  for (int m = 0; m < cell.num_layers; ++m) {
    if (!is_wet(cell.h[m], dry_tolerance)) {
      cell.hu[m] = 0.0;
      cell.hv[m] = 0.0;
    }
  }
}

}  // namespace mlamr
