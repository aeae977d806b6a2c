#include "mlamr/regrid.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <stdexcept>

#include "mlamr/coarsen.hpp"
#include "mlamr/refine.hpp"

namespace mlamr {

FlagMap::FlagMap(IndexBox b, int buffer)
    : box(b), buffer_width(buffer), flags(static_cast<std::size_t>(b.num_cells()), 0) {}

std::int64_t FlagMap::count() const {
  return std::count(flags.begin(), flags.end(), std::uint8_t{1});
}

void FlagMap::dilate(int n) {
  if (n <= 0) return;
  const int nx = box.nx();
  const int ny = box.ny();
  std::vector<std::uint8_t> tmp(flags.size(), 0);
  for (int j = 0; j < ny; ++j) {
    for (int i = 0; i < nx; ++i) {
      if (!flags[static_cast<std::size_t>(j) * nx + i]) continue;
      for (int k = std::max(0, i - n); k <= std::min(nx - 1, i + n); ++k)
        tmp[static_cast<std::size_t>(j) * nx + k] = 1;
    }
  }
  std::fill(flags.begin(), flags.end(), std::uint8_t{0});
  for (int j = 0; j < ny; ++j) {
    for (int i = 0; i < nx; ++i) {
      if (!tmp[static_cast<std::size_t>(j) * nx + i]) continue;
      for (int k = std::max(0, j - n); k <= std::min(ny - 1, j + n); ++k)
        flags[static_cast<std::size_t>(k) * nx + i] = 1;
    }
  }
}

void RegridPolicy::validate() const {
  if (wave_tolerance.empty()) throw std::invalid_argument("wave_tolerance needs at least one value");
  for (double t : wave_tolerance)
    if (!(t > 0.0)) throw std::invalid_argument("wave_tolerance must be positive");
  if (regrid_interval < 1) throw std::invalid_argument("regrid_interval must be >= 1");
  if (buffer_width < 0) throw std::invalid_argument("buffer_width must be >= 0");
  if (!(efficiency_target > 0.0 && efficiency_target <= 1.0))
    throw std::invalid_argument("efficiency_target must be in (0, 1]");
}

double RegridPolicy::tolerance(int m) const {
  const auto k = static_cast<std::size_t>(m);
  return k < wave_tolerance.size() ? wave_tolerance[k] : wave_tolerance.back();
}

FlagMap flag_cells(const Hierarchy& hierarchy, int l, const RegridPolicy& policy,
                   const ProblemSetup& setup, const LayerParams& params) {
  const LevelLadder& ladder = hierarchy.ladder();
  FlagMap fm(ladder.domain_box(l), policy.buffer_width);
  const double tol = params.dry_tolerance;
  const int reach = std::min(policy.buffer_width, kGhostWidth);
  for (const Patch& p : hierarchy.patches(l)) {
    const IndexBox b = p.box();
    const int M = p.num_layers();
    for (int j = b.lo_j; j <= b.hi_j; ++j) {
      for (int i = b.lo_i; i <= b.hi_i; ++i) {
        const CellState c = p.cell(i, j);
        const SurfaceSet s = surfaces_from_state(c);
        const SurfaceSet rest = setup.rest_surfaces(c.bathy, params);
        bool flag = false;
        for (int m = 0; m < M && !flag; ++m)
          flag = std::fabs(s.eta[m] - rest.eta[m]) > policy.tolerance(m);
        if (!flag && policy.flag_fronts) {
          for (int m = 0; m < M && !flag; ++m) {
            if (!(c.h[m] > tol)) continue;
            for (int dj = -reach; dj <= reach && !flag; ++dj)
              for (int di = -reach; di <= reach && !flag; ++di)
                flag = !(p.h(m, i + di, j + dj) > tol);
          }
        }
        if (flag) fm.set(i, j);
      }
    }
  }
  fm.dilate(policy.buffer_width);
  if (!policy.allowed_regions.empty()) {
    for (int j = fm.box.lo_j; j <= fm.box.hi_j; ++j) {
      const double y = ladder.y_center(l, j);
      for (int i = fm.box.lo_i; i <= fm.box.hi_i; ++i) {
        if (!fm.get(i, j)) continue;
        const double x = ladder.x_center(l, i);
        const bool inside = std::any_of(
            policy.allowed_regions.begin(), policy.allowed_regions.end(), [&](const Extent& e) {
              return x >= e.x_lower && x <= e.x_upper && y >= e.y_lower && y <= e.y_upper;
            });
        if (!inside) fm.set(i, j, false);
      }
    }
  }
  return fm;
}

namespace {

struct Clusterer {
  const FlagMap& fm;
  const std::vector<std::uint8_t>* allowed;
  std::vector<std::uint8_t> flags;  // after masking
  double efficiency;
  std::vector<IndexBox> out;

  bool flag(int i, int j) const { return flags[fm.offset(i, j)] != 0; }
  bool ok(int i, int j) const { return !allowed || (*allowed)[fm.offset(i, j)] != 0; }

  IndexBox bounding(const IndexBox& b) const {
    IndexBox r{b.hi_i + 1, b.hi_j + 1, b.lo_i - 1, b.lo_j - 1};
    for (int j = b.lo_j; j <= b.hi_j; ++j)
      for (int i = b.lo_i; i <= b.hi_i; ++i)
        if (flag(i, j)) {
          r.lo_i = std::min(r.lo_i, i);
          r.hi_i = std::max(r.hi_i, i);
          r.lo_j = std::min(r.lo_j, j);
          r.hi_j = std::max(r.hi_j, j);
        }
    return r;
  }

  // Returns the first index of the upper half along `dir`, or INT_MIN when no split.
  static int hole_cut(const std::vector<int>& sig, int lo, double& score) {
    const int n = static_cast<int>(sig.size());
    int best = -1;
    double best_d = 1e300;
    for (int k = 1; k < n - 1; ++k) {
      if (sig[k] != 0) continue;
      const double d = std::fabs(k - 0.5 * (n - 1));
      if (d < best_d) {
        best_d = d;
        best = k;
      }
    }
    score = best_d;
    return best < 0 ? -1 : lo + best;
  }

  static int inflection_cut(const std::vector<int>& sig, int lo, int& strength) {
    const int n = static_cast<int>(sig.size());
    strength = -1;
    int best = -1;
    double best_d = 1e300;
    if (n < 4) return -1;
    std::vector<int> lap(static_cast<std::size_t>(n), 0);
    for (int k = 1; k < n - 1; ++k) lap[k] = sig[k - 1] - 2 * sig[k] + sig[k + 1];
    for (int k = 1; k < n - 2; ++k) {
      if ((lap[k] > 0 && lap[k + 1] < 0) || (lap[k] < 0 && lap[k + 1] > 0)) {
        const int s = std::abs(lap[k + 1] - lap[k]);
        const double d = std::fabs(k + 0.5 - 0.5 * (n - 1));
        if (s > strength || (s == strength && d < best_d)) {
          strength = s;
          best = k + 1;
          best_d = d;
        }
      }
    }
    return best < 0 ? -1 : lo + best;
  }

  void run(IndexBox box) {
    box = bounding(box);
    if (box.empty()) return;
    std::int64_t count = 0;
    bool all_ok = true;
    std::vector<int> sx(static_cast<std::size_t>(box.nx()), 0);
    std::vector<int> sy(static_cast<std::size_t>(box.ny()), 0);
    for (int j = box.lo_j; j <= box.hi_j; ++j)
      for (int i = box.lo_i; i <= box.hi_i; ++i) {
        if (flag(i, j)) {
          ++count;
          ++sx[i - box.lo_i];
          ++sy[j - box.lo_j];
        }
        if (all_ok && !ok(i, j)) all_ok = false;
      }
    const std::int64_t area = box.num_cells();
    if (area == 1 || (all_ok && static_cast<double>(count) >= efficiency * static_cast<double>(area))) {
      out.push_back(box);
      return;
    }
    int dir = -1;
    int cut = -1;
    double dx_score = 1e300, dy_score = 1e300;
    const int hx = box.nx() > 2 ? hole_cut(sx, box.lo_i, dx_score) : -1;
    const int hy = box.ny() > 2 ? hole_cut(sy, box.lo_j, dy_score) : -1;
    if (hx >= 0 || hy >= 0) {
      if (hx >= 0 && (hy < 0 || box.nx() >= box.ny())) {
        dir = 0;
        cut = hx;
      } else {
        dir = 1;
        cut = hy;
      }
    } else {
      int stx = -1, sty = -1;
      const int ix = inflection_cut(sx, box.lo_i, stx);
      const int iy = inflection_cut(sy, box.lo_j, sty);
      if (ix >= 0 || iy >= 0) {
        if (ix >= 0 && (iy < 0 || stx > sty || (stx == sty && box.nx() >= box.ny()))) {
          dir = 0;
          cut = ix;
        } else {
          dir = 1;
          cut = iy;
        }
      } else if (box.nx() >= box.ny()) {
        dir = 0;
        cut = box.lo_i + box.nx() / 2;
      } else {
        dir = 1;
        cut = box.lo_j + box.ny() / 2;
      }
    }
    IndexBox a = box;
    IndexBox b = box;
    if (dir == 0) {
      a.hi_i = cut - 1;
      b.lo_i = cut;
    } else {
      a.hi_j = cut - 1;
      b.lo_j = cut;
    }
    run(a);
    run(b);
  }
};

}  // namespace

std::vector<IndexBox> cluster_flags(const FlagMap& flags, double efficiency,
                                    const std::vector<std::uint8_t>* allowed) {
  Clusterer c{flags, allowed, flags.flags, efficiency, {}};
  if (allowed)
    for (std::size_t k = 0; k < c.flags.size(); ++k)
      if (!(*allowed)[k]) c.flags[k] = 0;
  c.run(flags.box);
  return c.out;
}

LayerArray composite_volume(const Hierarchy& h) {
  LayerArray total{};
  const LevelLadder& ladder = h.ladder();
  for (int l = 1; l <= h.max_levels(); ++l) {
    const LevelSpec& s = ladder.level(l);
    const double area = s.dx * s.dy;
    for (const Patch& p : h.patches(l)) {
      const IndexBox b = p.box();
      std::vector<std::uint8_t> covered(static_cast<std::size_t>(b.num_cells()), 0);
      if (l < h.max_levels()) {
        for (const Patch& f : h.patches(l + 1)) {
          const IndexBox c = f.box().coarsened(s.r_x, s.r_y).intersect(b);
          for (int j = c.lo_j; j <= c.hi_j; ++j)
            for (int i = c.lo_i; i <= c.hi_i; ++i)
              covered[static_cast<std::size_t>(j - b.lo_j) * b.nx() + (i - b.lo_i)] = 1;
        }
      }
      for (int m = 0; m < p.num_layers(); ++m) {
        double sum = 0.0;
        for (int j = b.lo_j; j <= b.hi_j; ++j)
          for (int i = b.lo_i; i <= b.hi_i; ++i)
            if (!covered[static_cast<std::size_t>(j - b.lo_j) * b.nx() + (i - b.lo_i)])
              sum += p.h(m, i, j);
        total[m] += sum * area;
      }
    }
  }
  return total;
}

RegridReport regrid_level(Hierarchy& h, int l, const RegridPolicy& policy,
                          const ProblemSetup& setup, const LayerParams& params,
                          NewCellSource source) {
  RegridReport report;
  const LevelLadder& ladder = h.ladder();
  const BoundarySet bc = setup.boundaries();
  const int M = h.num_layers();
  const LayerArray before = composite_volume(h);

  for (int lev = l; lev < h.max_levels(); ++lev) {
    auto& coarse_patches = h.patches(lev);
    if (coarse_patches.empty()) break;
    const LevelSpec& cs = ladder.level(lev);
    const RefinementRatio r = cs.ratio();
    const double time = coarse_patches.front().time;

    const FlagMap flags = flag_cells(h, lev, policy, setup, params);
    const std::vector<std::uint8_t> allowed = nesting_mask(h, lev);
    const std::vector<IndexBox> boxes = cluster_flags(flags, policy.efficiency_target, &allowed);

    std::vector<Patch>& old_fine = h.patches(lev + 1);
    std::vector<Patch> fresh;
    fresh.reserve(boxes.size());
    for (const IndexBox& cb : boxes) {
      Patch fp(lev + 1, cb.refined(r.x, r.y), M);
      fp.time = time;
      fill_bathymetry(fp, ladder, setup);
      const IndexBox fb = fp.box();

      std::vector<std::uint8_t> copied(static_cast<std::size_t>(fb.num_cells()), 0);
      std::int64_t ncopied = 0;
      for (const Patch& op : old_fine) {
        const IndexBox ov = op.box().intersect(fb);
        for (int j = ov.lo_j; j <= ov.hi_j; ++j)
          for (int i = ov.lo_i; i <= ov.hi_i; ++i) {
            auto& flag = copied[static_cast<std::size_t>(j - fb.lo_j) * fb.nx() + (i - fb.lo_i)];
            if (flag) continue;
            flag = 1;
            ++ncopied;
          }
      }

      if (ncopied < fb.num_cells()) {
        if (source == NewCellSource::initial_condition) {
          fill_initial_state(fp, ladder, setup, params);
          report.cells_initialized += fb.num_cells() - ncopied;
        } else {
          const IndexBox footprint = cb.grown(1).intersect(ladder.domain_box(lev));
          Patch gather(lev, footprint, M);
          gather.time = time;
          fill_bathymetry(gather, ladder, setup);
          fill_patch(gather, h, lev, 1.0, bc, params, true);
          const double inv = 1.0 / (r.x * r.y);
          for (int cj = cb.lo_j; cj <= cb.hi_j; ++cj)
            for (int ci = cb.lo_i; ci <= cb.hi_i; ++ci) {
              double sum = 0.0;
              const IndexBox blk = fine_cells_of(ci, cj, r);
              for (int j = blk.lo_j; j <= blk.hi_j; ++j)
                for (int i = blk.lo_i; i <= blk.hi_i; ++i) sum += fp.bathy(i, j);
              const double cbathy = gather.bathy(ci, cj);
              if (std::fabs(sum * inv - cbathy) > 1e-12 * std::max(1.0, std::fabs(cbathy)))
                throw GeometryError("coarse bathymetry at level " + std::to_string(lev) +
                                    " is not the mean of its fine cells");
            }
          refine_patch(gather.view(), fp, r, cs.dx, cs.dy, params);
          report.cells_interpolated += fb.num_cells() - ncopied;
        }
      }
      if (ncopied > 0) {
        for (const Patch& op : old_fine) {
          const IndexBox ov = op.box().intersect(fb);
          for (int j = ov.lo_j; j <= ov.hi_j; ++j)
            for (int i = ov.lo_i; i <= ov.hi_i; ++i)
              for (int c = 1; c < fp.num_components(); ++c)
                fp.component(c)[fp.index(i, j)] = op.component(c)[op.index(i, j)];
        }
        report.cells_copied += ncopied;
      }
      fresh.push_back(std::move(fp));
    }

    bool same = fresh.size() == old_fine.size();
    for (std::size_t k = 0; same && k < fresh.size(); ++k) same = fresh[k].box() == old_fine[k].box();
    if (!same) report.changed = true;

    old_fine = std::move(fresh);
    if (old_fine.empty()) {
      for (int k = lev + 2; k <= h.max_levels(); ++k) h.patches(k).clear();
      break;
    }
    for (Patch& p : h.patches(lev + 1)) fill_patch(p, h, lev + 1, 1.0, bc, params);
  }

  for (int lev = h.active_levels() - 1; lev >= l; --lev) {
    const LevelSpec& cs = ladder.level(lev);
    average_down(h.patches(lev + 1), h.patches(lev), cs.ratio(), cs.dx, cs.dy,
                 params.dry_tolerance);
  }
  h.check_nesting();
  const LayerArray after = composite_volume(h);
  for (int m = 0; m < M; ++m) report.mass_delta[m] = after[m] - before[m];
  return report;
}

}  // namespace mlamr
