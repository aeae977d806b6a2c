#include "mlamr/refine.hpp"

#include <algorithm>

namespace mlamr {

double layer_surface(const PatchView& v, int m, int i, int j) {
  double eta = v.bathy(i, j);
  for (int n = v.num_layers - 1; n >= m; --n) eta += v.h(n, i, j);
  return eta;
}

namespace {

template <class Value>
SlopePair limited_slopes(const PatchView& v, int m, int i, int j, double dx, double dy,
                         double tol, Value value) {
  SlopePair s;
  auto wet = [&](int a, int b) { return v.h(m, a, b) > tol; };
  if (!wet(i, j)) return s;
  const double c = value(i, j);
  if (wet(i - 1, j) && wet(i + 1, j))
    s.sx = minmod(c - value(i - 1, j), value(i + 1, j) - c) / dx;
  if (wet(i, j - 1) && wet(i, j + 1))
    s.sy = minmod(c - value(i, j - 1), value(i, j + 1) - c) / dy;
  return s;
}

}  // namespace

SlopePair surface_slopes(const PatchView& coarse, int m, int i, int j, double dx, double dy,
                         double dry_tolerance) {
  return limited_slopes(coarse, m, i, j, dx, dy, dry_tolerance,
                        [&](int a, int b) { return layer_surface(coarse, m, a, b); });
}

SlopePair component_slopes(const PatchView& coarse, int comp, int m, int i, int j, double dx,
                           double dy, double dry_tolerance) {
  return limited_slopes(coarse, m, i, j, dx, dy, dry_tolerance,
                        [&](int a, int b) { return coarse.get(comp, a, b); });
}

std::vector<double> interpolate_layer_surface(const PatchView& coarse, int m,
                                              const IndexBox& fine_box, const RefinementRatio& r,
                                              double coarse_dx, double coarse_dy,
                                              double dry_tolerance) {
  std::vector<double> out(static_cast<std::size_t>(fine_box.num_cells()));
  const IndexBox cb = fine_box.coarsened(r.x, r.y);
  for (int cj = cb.lo_j; cj <= cb.hi_j; ++cj) {
    for (int ci = cb.lo_i; ci <= cb.hi_i; ++ci) {
      const double eta = layer_surface(coarse, m, ci, cj);
      const SlopePair s = surface_slopes(coarse, m, ci, cj, coarse_dx, coarse_dy, dry_tolerance);
      const IndexBox block = fine_cells_of(ci, cj, r).intersect(fine_box);
      for (int fj = block.lo_j; fj <= block.hi_j; ++fj) {
        const double oy = fine_offset(fj, r.y) * coarse_dy;
        for (int fi = block.lo_i; fi <= block.hi_i; ++fi) {
          const double ox = fine_offset(fi, r.x) * coarse_dx;
          out[static_cast<std::size_t>(fj - fine_box.lo_j) * fine_box.nx() + (fi - fine_box.lo_i)] =
              eta + s.sx * ox + s.sy * oy;
        }
      }
    }
  }
  return out;
}

SurfaceSample sample_coarse(const PatchView& coarse, int fine_i, int fine_j,
                            const RefinementRatio& r, double coarse_dx, double coarse_dy,
                            double tol) {
  SurfaceSample out;
  const int ci = coarse_cell_of(fine_i, r.x);
  const int cj = coarse_cell_of(fine_j, r.y);
  const double ox = fine_offset(fine_i, r.x) * coarse_dx;
  const double oy = fine_offset(fine_j, r.y) * coarse_dy;
  for (int m = 0; m < coarse.num_layers; ++m) {
    const SlopePair se = surface_slopes(coarse, m, ci, cj, coarse_dx, coarse_dy, tol);
    out.eta[m] = layer_surface(coarse, m, ci, cj) + se.sx * ox + se.sy * oy;
    const SlopePair su = component_slopes(coarse, 2 + 3 * m, m, ci, cj, coarse_dx, coarse_dy, tol);
    out.hu[m] = coarse.hu(m, ci, cj) + su.sx * ox + su.sy * oy;
    const SlopePair sv = component_slopes(coarse, 3 + 3 * m, m, ci, cj, coarse_dx, coarse_dy, tol);
    out.hv[m] = coarse.hv(m, ci, cj) + sv.sx * ox + sv.sy * oy;
  }
  return out;
}

CellState rebuild_cell(const SurfaceSample& s, double bathy, int num_layers, double tol,
                       LayerArray* clipped) {
  SurfaceSet surf;
  surf.num_layers = num_layers;
  surf.eta = s.eta;
  LayerArray local{};
  CellState c = state_from_surfaces(surf, bathy, num_layers, tol, &local);
  for (int m = 0; m < num_layers; ++m) {
    c.hu[m] = s.hu[m];
    c.hv[m] = s.hv[m];
    if (clipped) (*clipped)[m] += local[m];
  }
  zero_dry_momenta(c, tol);
  return c;
}

RefineResult refine_patch(const PatchView& coarse, Patch& fine, const RefinementRatio& r,
                          double coarse_dx, double coarse_dy, const LayerParams& params) {
  const IndexBox fb = fine.box();
  const IndexBox footprint = fb.coarsened(r.x, r.y);
  if (!coarse.ghost_box().contains(footprint.grown(1)))
    throw GeometryError("fine box " + to_string(fb) + " is not inside the coarse data footprint " +
                        to_string(coarse.box));
  const int M = fine.num_layers();
  const double tol = params.dry_tolerance;
  const double fine_area = coarse_dx * coarse_dy / (r.x * r.y);

  // bottom layer first, then upward on the recovered effective bathymetry
  for (int m = M - 1; m >= 0; --m) {
    const std::vector<double> eta =
        interpolate_layer_surface(coarse, m, fb, r, coarse_dx, coarse_dy, tol);
    for (int j = fb.lo_j; j <= fb.hi_j; ++j) {
      for (int i = fb.lo_i; i <= fb.hi_i; ++i) {
        double floor = fine.bathy(i, j);
        for (int n = M - 1; n > m; --n) floor += fine.h(n, i, j);
        const double e = eta[static_cast<std::size_t>(j - fb.lo_j) * fb.nx() + (i - fb.lo_i)];
        fine.h(m, i, j) = std::max(0.0, e - floor);
      }
    }
    for (int cj = footprint.lo_j; cj <= footprint.hi_j; ++cj) {
      for (int ci = footprint.lo_i; ci <= footprint.hi_i; ++ci) {
        const SlopePair su = component_slopes(coarse, 2 + 3 * m, m, ci, cj, coarse_dx, coarse_dy, tol);
        const SlopePair sv = component_slopes(coarse, 3 + 3 * m, m, ci, cj, coarse_dx, coarse_dy, tol);
        const double qu = coarse.hu(m, ci, cj);
        const double qv = coarse.hv(m, ci, cj);
        const IndexBox block = fine_cells_of(ci, cj, r);
        for (int j = block.lo_j; j <= block.hi_j; ++j) {
          const double oy = fine_offset(j, r.y) * coarse_dy;
          for (int i = block.lo_i; i <= block.hi_i; ++i) {
            const double ox = fine_offset(i, r.x) * coarse_dx;
            const bool wet = fine.h(m, i, j) > tol;
            fine.hu(m, i, j) = wet ? qu + su.sx * ox + su.sy * oy : 0.0;
            fine.hv(m, i, j) = wet ? qv + sv.sx * ox + sv.sy * oy : 0.0;
          }
        }
      }
    }
  }

  RefineResult res;
  res.cells = fb.num_cells();
  for (int m = 0; m < M; ++m) {
    double fine_sum = 0.0;
    for (int j = fb.lo_j; j <= fb.hi_j; ++j)
      for (int i = fb.lo_i; i <= fb.hi_i; ++i) fine_sum += fine.h(m, i, j);
    double coarse_sum = 0.0;
    for (int cj = footprint.lo_j; cj <= footprint.hi_j; ++cj)
      for (int ci = footprint.lo_i; ci <= footprint.hi_i; ++ci) coarse_sum += coarse.h(m, ci, cj);
    res.mass_delta[m] = fine_sum * fine_area - coarse_sum * coarse_dx * coarse_dy;
  }
  return res;
}

}  // namespace mlamr
