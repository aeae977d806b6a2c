#pragma once

#include <vector>

#include "mlamr/mesh.hpp"
#include "mlamr/state.hpp"

namespace mlamr {

/// Smaller-magnitude argument when both share a sign, else zero.
inline double minmod(double a, double b) {
  if (a * b <= 0.0) return 0.0;
  return (a > 0.0) ? (a < b ? a : b) : (a > b ? a : b);
}

/// Limited gradients of one quantity at a coarse cell, per unit length.
struct SlopePair {
  double sx = 0.0;
  double sy = 0.0;
};

/// Surface elevation of layer m at (i, j): bathymetry plus layers m..M-1.
double layer_surface(const PatchView& v, int m, int i, int j);

/// Minmod slopes of eta_m at coarse cell (i, j). A direction whose three-cell
/// stencil holds a cell where layer m is dry gets a zero slope.
SlopePair surface_slopes(const PatchView& coarse, int m, int i, int j, double dx, double dy,
                         double dry_tolerance);

/// Same limiter applied to a stored component (momenta), dry mask of layer m.
SlopePair component_slopes(const PatchView& coarse, int comp, int m, int i, int j, double dx,
                           double dy, double dry_tolerance);

/// Offset of a fine cell center from its coarse parent's center, in coarse cell widths.
inline double fine_offset(int fine, int ratio) {
  const int k = coarse_cell_of(fine, ratio);
  return (static_cast<double>(fine - k * ratio) + 0.5) / ratio - 0.5;
}

/// Piecewise-linear eta_m on every cell of `fine_box` (row-major), read from coarse data.
std::vector<double> interpolate_layer_surface(const PatchView& coarse, int m,
                                              const IndexBox& fine_box, const RefinementRatio& r,
                                              double coarse_dx, double coarse_dy,
                                              double dry_tolerance);

/// Interpolated surfaces and momenta at one fine location, before depth recovery.
struct SurfaceSample {
  LayerArray eta{};
  LayerArray hu{};
  LayerArray hv{};
};

SurfaceSample sample_coarse(const PatchView& coarse, int fine_i, int fine_j,
                            const RefinementRatio& r, double coarse_dx, double coarse_dy,
                            double dry_tolerance);

/// Layer-marching depth recovery from surfaces: bottom layer first against the
/// bed, each upper layer against the recovered effective bathymetry. Momenta of
/// dry layers are zeroed. Adds clipped depth to `clipped` when given.
CellState rebuild_cell(const SurfaceSample& s, double bathy, int num_layers, double dry_tolerance,
                       LayerArray* clipped = nullptr);

struct RefineResult {
  LayerArray mass_delta{};  // fine volume minus the coarse volume it replaces
  std::int64_t cells = 0;
};

/// Initializes the interior of `fine` (bathymetry already set) from coarse data.
/// Throws GeometryError when the fine footprint plus one stencil cell is not
/// inside the coarse data.
RefineResult refine_patch(const PatchView& coarse, Patch& fine, const RefinementRatio& r,
                          double coarse_dx, double coarse_dy, const LayerParams& params);

}  // namespace mlamr
