#include "mlamr/setup.hpp"

#include <vector>

#include "mlamr/refine.hpp"

namespace mlamr {

void fill_bathymetry(Patch& patch, const LevelLadder& ladder, const ProblemSetup& setup) {
  const int l = patch.level();
  const int finest = ladder.num_levels();
  int rx = 1, ry = 1;
  for (int k = l; k < finest; ++k) {
    rx *= ladder.level(k).r_x;
    ry *= ladder.level(k).r_y;
  }
  const IndexBox region = patch.ghost_box().intersect(ladder.domain_box(l));
  const double inv = 1.0 / (static_cast<double>(rx) * ry);
  for (int j = region.lo_j; j <= region.hi_j; ++j) {
    for (int i = region.lo_i; i <= region.hi_i; ++i) {
      const IndexBox sub = IndexBox{i, j, i, j}.refined(rx, ry);
      double sum = 0.0;
      for (int fj = sub.lo_j; fj <= sub.hi_j; ++fj) {
        const double y0 = ladder.y_edge(finest, fj);
        const double y1 = ladder.y_edge(finest, fj + 1);
        for (int fi = sub.lo_i; fi <= sub.hi_i; ++fi)
          sum += setup.bathymetry_average(ladder.x_edge(finest, fi), ladder.x_edge(finest, fi + 1),
                                          y0, y1);
      }
      patch.bathy(i, j) = sum * inv;
    }
  }
}

void fill_initial_state(Patch& patch, const LevelLadder& ladder, const ProblemSetup& setup,
                        const LayerParams& params) {
  const int l = patch.level();
  const IndexBox b = patch.box();
  for (int j = b.lo_j; j <= b.hi_j; ++j) {
    for (int i = b.lo_i; i <= b.hi_i; ++i) {
      CellState c = setup.initial_state(ladder.x_center(l, i), ladder.y_center(l, j),
                                        patch.bathy(i, j), params);
      c.bathy = patch.bathy(i, j);
      zero_dry_momenta(c, params.dry_tolerance);
      patch.set_cell(i, j, c);
    }
  }
}

void fill_patch(Patch& target, const Hierarchy& hierarchy, int l, double alpha,
                const BoundarySet& bc, const LayerParams& params, bool include_interior) {
  const IndexBox gb = target.ghost_box();
  const IndexBox dom = hierarchy.ladder().domain_box(l);
  const IndexBox in_dom = gb.intersect(dom);
  const int stride = gb.nx();
  std::vector<std::uint8_t> done(static_cast<std::size_t>(gb.num_cells()), 0);
  auto mark = [&](const IndexBox& r) {
    for (int j = r.lo_j; j <= r.hi_j; ++j)
      for (int i = r.lo_i; i <= r.hi_i; ++i)
        done[static_cast<std::size_t>(j - gb.lo_j) * stride + (i - gb.lo_i)] = 1;
  };
  if (!include_interior) mark(target.box());

  for (const Patch& src : hierarchy.patches(l)) {
    if (&src == &target) continue;
    const IndexBox overlap = in_dom.intersect(src.box());
    if (overlap.empty()) continue;
    for (int j = overlap.lo_j; j <= overlap.hi_j; ++j) {
      for (int i = overlap.lo_i; i <= overlap.hi_i; ++i) {
        auto& d = done[static_cast<std::size_t>(j - gb.lo_j) * stride + (i - gb.lo_i)];
        if (d) continue;
        d = 1;
        for (int c = 0; c < target.num_components(); ++c)
          target.component(c)[target.index(i, j)] = src.component(c)[src.index(i, j)];
      }
    }
  }

  bool pending = false;
  for (int j = in_dom.lo_j; j <= in_dom.hi_j && !pending; ++j)
    for (int i = in_dom.lo_i; i <= in_dom.hi_i && !pending; ++i)
      pending = !done[static_cast<std::size_t>(j - gb.lo_j) * stride + (i - gb.lo_i)];

  if (pending) {
    if (l == 1)
      throw GeometryError("level-1 cells of " + to_string(target.box()) +
                          " are not covered by any patch");
    const LevelSpec& cs = hierarchy.ladder().level(l - 1);
    const RefinementRatio r = cs.ratio();
    const int M = target.num_layers();
    const double tol = params.dry_tolerance;
    for (int j = in_dom.lo_j; j <= in_dom.hi_j; ++j) {
      for (int i = in_dom.lo_i; i <= in_dom.hi_i; ++i) {
        if (done[static_cast<std::size_t>(j - gb.lo_j) * stride + (i - gb.lo_i)]) continue;
        const int ci = coarse_cell_of(i, r.x);
        const int cj = coarse_cell_of(j, r.y);
        const int k = hierarchy.find_patch(l - 1, ci, cj);
        if (k < 0)
          throw GeometryError("no level-" + std::to_string(l - 1) + " data under level-" +
                              std::to_string(l) + " cell (" + std::to_string(i) + "," +
                              std::to_string(j) + ")");
        const Patch& cp = hierarchy.patches(l - 1)[static_cast<std::size_t>(k)];
        SurfaceSample s;
        if (alpha >= 1.0 || !cp.has_old()) {
          s = sample_coarse(cp.view(), i, j, r, cs.dx, cs.dy, tol);
        } else if (alpha <= 0.0) {
          s = sample_coarse(cp.old_view(), i, j, r, cs.dx, cs.dy, tol);
        } else {
          const SurfaceSample a = sample_coarse(cp.old_view(), i, j, r, cs.dx, cs.dy, tol);
          const SurfaceSample b = sample_coarse(cp.view(), i, j, r, cs.dx, cs.dy, tol);
          for (int m = 0; m < M; ++m) {
            s.eta[m] = (1.0 - alpha) * a.eta[m] + alpha * b.eta[m];
            s.hu[m] = (1.0 - alpha) * a.hu[m] + alpha * b.hu[m];
            s.hv[m] = (1.0 - alpha) * a.hv[m] + alpha * b.hv[m];
          }
        }
        target.set_cell(i, j, rebuild_cell(s, target.bathy(i, j), M, tol));
      }
    }
  }
  fill_physical_boundaries(target, dom, bc);
}

}  // namespace mlamr
