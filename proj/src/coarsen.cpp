#include "mlamr/coarsen.hpp"

#include <sstream>

#include "mlamr/physics.hpp"

namespace mlamr {

CoarsenResult average_down(const Patch& fine, Patch& coarse, const RefinementRatio& r,
                           double coarse_dx, double coarse_dy, double dry_tolerance) {
  if (fine.time != coarse.time) {
    std::ostringstream os;
    os.precision(17);
    os << "cannot average level " << fine.level() << " (t=" << fine.time << ") onto level "
       << coarse.level() << " (t=" << coarse.time << ")";
    throw NumericalError(os.str());
  }
  CoarsenResult res;
  const IndexBox region = fine.box().coarsened(r.x, r.y).intersect(coarse.box());
  if (region.empty()) return res;
  const int M = coarse.num_layers();
  const double inv = 1.0 / (r.x * r.y);
  const double area = coarse_dx * coarse_dy;
  for (int cj = region.lo_j; cj <= region.hi_j; ++cj) {
    for (int ci = region.lo_i; ci <= region.hi_i; ++ci) {
      const IndexBox block = fine_cells_of(ci, cj, r);
      for (int m = 0; m < M; ++m) {
        double sh = 0.0, su = 0.0, sv = 0.0;
        for (int j = block.lo_j; j <= block.hi_j; ++j) {
          for (int i = block.lo_i; i <= block.hi_i; ++i) {
            sh += fine.h(m, i, j);
            su += fine.hu(m, i, j);
            sv += fine.hv(m, i, j);
          }
        }
        const double h = sh * inv;
        res.mass_delta[m] += (h - coarse.h(m, ci, cj)) * area;
        coarse.h(m, ci, cj) = h;
        const bool wet = h > dry_tolerance;
        coarse.hu(m, ci, cj) = wet ? su * inv : 0.0;
        coarse.hv(m, ci, cj) = wet ? sv * inv : 0.0;
      }
      ++res.cells_updated;
    }
  }
  return res;
}

CoarsenResult average_down(const std::vector<Patch>& fine, std::vector<Patch>& coarse,
                           const RefinementRatio& r, double coarse_dx, double coarse_dy,
                           double dry_tolerance) {
  CoarsenResult total;
  for (auto& c : coarse) {
    for (const auto& f : fine) {
      if (!f.box().coarsened(r.x, r.y).intersects(c.box())) continue;
      const CoarsenResult one = average_down(f, c, r, coarse_dx, coarse_dy, dry_tolerance);
      total.cells_updated += one.cells_updated;
      for (int m = 0; m < kMaxLayers; ++m) total.mass_delta[m] += one.mass_delta[m];
    }
  }
  return total;
}

}  // namespace mlamr
