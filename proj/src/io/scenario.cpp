#include "mlamr/io/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace mlamr::io {

double Scenario::bathymetry_average(double x0, double x1, double, double) const {
  if (x1 <= shelf_x) return bed_deep;
  if (x0 >= shelf_x) return bed_shelf;
  const double w = (shelf_x - x0) / (x1 - x0);
  return w * bed_deep + (1.0 - w) * bed_shelf;
}

SurfaceSet Scenario::rest_surfaces(double bathy, const LayerParams& params) const {
  SurfaceSet s;
  const int M = params.num_layers;
  s.num_layers = M;
  double below = bathy;
  for (int m = M - 1; m >= 0; --m) {
    below = std::max(below, m == 0 ? sea_level : interface_level);
    s.eta[m] = below;
  }
  return s;
}

CellState Scenario::initial_state(double x, double, double bathy,
                                  const LayerParams& params) const {
  SurfaceSet s = rest_surfaces(bathy, params);
  double bump = 0.0;
  if (kind == InitialKind::pulse) {
    const double q = (x - wave_center) / wave_width;
    bump = wave_amplitude * std::exp(-q * q);
    s.eta[0] += bump;
  } else {
    s.eta[0] = x < dam_x ? dam_left : dam_right;
  }
  CellState c = state_from_surfaces(s, bathy, params.num_layers, params.dry_tolerance);
  if (kind == InitialKind::pulse && wave_moving) {
    double depth = 0.0;
    for (int m = 0; m < c.num_layers; ++m) depth += c.h[m];
    if (depth > params.dry_tolerance) {
      const double u = std::sqrt(params.gravity * depth) * bump / depth;
      for (int m = 0; m < c.num_layers; ++m) c.hu[m] = c.h[m] * u;
    }
  }
  return c;
}

void Scenario::validate(const LayerParams& params) const {
  if (!std::is_sorted(frame_times.begin(), frame_times.end()))
    throw std::invalid_argument("frame_times must be sorted");
  if (!(final_time > 0.0)) throw std::invalid_argument("final_time must be positive");
  if (!(wave_width > 0.0)) throw std::invalid_argument("wave_width must be positive");
  const double floor = std::min(bed_deep, bed_shelf);
  if (params.num_layers > 1 && !(interface_level > floor && sea_level > interface_level))
    throw std::invalid_argument("no cell holds every layer: need bed < interface_level < sea_level");
  if (params.num_layers == 1 && kind == InitialKind::pulse && !(sea_level > floor))
    throw std::invalid_argument("sea_level lies below the bed everywhere");
}

Scenario shelf_demo() { return Scenario{}; }

const char* to_string(BoundaryKind k) { return k == BoundaryKind::wall ? "wall" : "outflow"; }

const char* to_string(InitialKind k) { return k == InitialKind::pulse ? "pulse" : "dam_break"; }

}  // namespace mlamr::io
