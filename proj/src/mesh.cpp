#include "mlamr/mesh.hpp"

#include <algorithm>
#include <sstream>

namespace mlamr {

IndexBox IndexBox::intersect(const IndexBox& o) const {
  return {std::max(lo_i, o.lo_i), std::max(lo_j, o.lo_j), std::min(hi_i, o.hi_i),
          std::min(hi_j, o.hi_j)};
}

IndexBox IndexBox::refined(int rx, int ry) const {
  return {lo_i * rx, lo_j * ry, (hi_i + 1) * rx - 1, (hi_j + 1) * ry - 1};
}

IndexBox IndexBox::coarsened(int rx, int ry) const {
  return {coarse_cell_of(lo_i, rx), coarse_cell_of(lo_j, ry), coarse_cell_of(hi_i, rx),
          coarse_cell_of(hi_j, ry)};
}

std::string to_string(const IndexBox& b) {
  std::ostringstream os;
  os << "[(" << b.lo_i << "," << b.lo_j << ")..(" << b.hi_i << "," << b.hi_j << ")]";
  return os.str();
}

LevelLadder::LevelLadder(Extent domain, int coarse_nx, int coarse_ny,
                         std::vector<RefinementRatio> ratios)
    : domain_(domain) {
  if (!(domain.width() > 0.0) || !(domain.height() > 0.0))
    throw GeometryError("domain extent must be positive in both directions");
  if (coarse_nx < 4 || coarse_ny < 4)
    throw GeometryError("coarse grid needs at least 4 cells per direction");
  const double dx1 = domain.width() / coarse_nx;
  const double dy1 = domain.height() / coarse_ny;
  long long px = 1;
  long long py = 1;
  for (std::size_t k = 0; k <= ratios.size(); ++k) {
    LevelSpec s;
    s.level_index = static_cast<int>(k) + 1;
    s.nx = static_cast<int>(coarse_nx * px);
    s.ny = static_cast<int>(coarse_ny * py);
    s.dx = dx1 / static_cast<double>(px);
    s.dy = dy1 / static_cast<double>(py);
    if (k < ratios.size()) {
      const auto& r = ratios[k];
      if (r.x < 2 || r.y < 2)
        throw GeometryError("spatial refinement ratio must be >= 2 (level " +
                            std::to_string(k + 1) + ")");
      if (r.t < 1) throw GeometryError("temporal refinement ratio must be >= 1");
      s.r_x = r.x;
      s.r_y = r.y;
      s.r_t = r.t;
      px *= r.x;
      py *= r.y;
    }
    levels_.push_back(s);
  }
}

CellState PatchView::cell(int i, int j) const {
  CellState c;
  c.num_layers = num_layers;
  c.bathy = bathy(i, j);
  for (int m = 0; m < num_layers; ++m) {
    c.h[m] = h(m, i, j);
    c.hu[m] = hu(m, i, j);
    c.hv[m] = hv(m, i, j);
  }
  return c;
}

void SideAccumulator::reset(int num_layers, int nx, int ny) {
  left.assign(static_cast<std::size_t>(num_layers * ny), 0.0);
  right.assign(static_cast<std::size_t>(num_layers * ny), 0.0);
  bottom.assign(static_cast<std::size_t>(num_layers * nx), 0.0);
  top.assign(static_cast<std::size_t>(num_layers * nx), 0.0);
}

Patch::Patch(int level, IndexBox box, int num_layers)
    : level_(level), box_(box), num_layers_(num_layers) {
  if (box.empty()) throw GeometryError("patch box must be non-empty");
  cells_ = static_cast<std::size_t>(box.nx() + 2 * kGhostWidth) *
           static_cast<std::size_t>(box.ny() + 2 * kGhostWidth);
  data_.assign(cells_ * static_cast<std::size_t>(num_components()), 0.0);
}

CellState Patch::cell(int i, int j) const { return view().cell(i, j); }

void Patch::set_cell(int i, int j, const CellState& s) {
  const std::size_t k = index(i, j);
  component(0)[k] = s.bathy;
  for (int m = 0; m < num_layers_; ++m) {
    component(1 + 3 * m)[k] = s.h[m];
    component(2 + 3 * m)[k] = s.hu[m];
    component(3 + 3 * m)[k] = s.hv[m];
  }
}

Hierarchy::Hierarchy(LevelLadder ladder, int num_layers)
    : ladder_(std::move(ladder)), num_layers_(num_layers) {
  patches_.resize(static_cast<std::size_t>(ladder_.num_levels()));
}

int Hierarchy::active_levels() const {
  int n = 0;
  for (const auto& lvl : patches_) {
    if (lvl.empty()) break;
    ++n;
  }
  return n;
}

int Hierarchy::find_patch(int l, int i, int j) const {
  const auto& ps = patches(l);
  for (std::size_t k = 0; k < ps.size(); ++k)
    if (ps[k].box().contains(i, j)) return static_cast<int>(k);
  return -1;
}

bool Hierarchy::covered_by_finer(int l, int i, int j) const {
  if (l >= max_levels()) return false;
  const auto r = ladder_.level(l).ratio();
  for (const auto& p : patches(l + 1))
    if (p.box().coarsened(r.x, r.y).contains(i, j)) return true;
  return false;
}

IndexBox Hierarchy::fine_cells_of(int l, int i, int j) const {
  if (!covered_by_finer(l, i, j))
    throw NotRefinedError("level " + std::to_string(l) + " cell (" + std::to_string(i) + "," +
                          std::to_string(j) + ") is not refined");
  return mlamr::fine_cells_of(i, j, ladder_.level(l).ratio());
}

std::vector<std::uint8_t> nesting_mask(const Hierarchy& h, int l) {
  const IndexBox dom = h.ladder().domain_box(l);
  const std::size_t nx = static_cast<std::size_t>(dom.nx());
  std::vector<std::uint8_t> inside(nx * static_cast<std::size_t>(dom.ny()), 0);
  for (const auto& p : h.patches(l)) {
    const IndexBox b = p.box().intersect(dom);
    for (int j = b.lo_j; j <= b.hi_j; ++j)
      for (int i = b.lo_i; i <= b.hi_i; ++i) inside[static_cast<std::size_t>(j) * nx + i] = 1;
  }
  if (l == 1) return inside;
  std::vector<std::uint8_t> mask(inside.size(), 0);
  for (int j = 0; j <= dom.hi_j; ++j) {
    for (int i = 0; i <= dom.hi_i; ++i) {
      bool ok = inside[static_cast<std::size_t>(j) * nx + i] != 0;
      for (int dj = -1; dj <= 1 && ok; ++dj) {
        for (int di = -1; di <= 1 && ok; ++di) {
          const int ii = i + di;
          const int jj = j + dj;
          if (!dom.contains(ii, jj)) continue;
          ok = inside[static_cast<std::size_t>(jj) * nx + ii] != 0;
        }
      }
      mask[static_cast<std::size_t>(j) * nx + i] = ok ? 1 : 0;
    }
  }
  return mask;
}

void Hierarchy::check_nesting() const {
  for (int l = 1; l <= max_levels(); ++l) {
    const auto& ps = patches(l);
    const IndexBox dom = ladder_.domain_box(l);
    for (std::size_t a = 0; a < ps.size(); ++a) {
      if (!dom.contains(ps[a].box()))
        throw GeometryError("level " + std::to_string(l) + " patch " + to_string(ps[a].box()) +
                            " leaves the domain");
      for (std::size_t b = a + 1; b < ps.size(); ++b)
        if (ps[a].box().intersects(ps[b].box()))
          throw GeometryError("level " + std::to_string(l) + " patches overlap: " +
                              to_string(ps[a].box()) + " and " + to_string(ps[b].box()));
    }
    if (l == 1 || ps.empty()) continue;
    const auto r = ladder_.level(l - 1).ratio();
    const auto mask = nesting_mask(*this, l - 1);
    const std::size_t cnx = static_cast<std::size_t>(ladder_.level(l - 1).nx);
    for (const auto& p : ps) {
      if (p.box().refined(1, 1) != p.box().coarsened(r.x, r.y).refined(r.x, r.y))
        throw GeometryError("level " + std::to_string(l) + " patch " + to_string(p.box()) +
                            " is not aligned to coarse cells");
      const IndexBox cb = p.box().coarsened(r.x, r.y);
      for (int j = cb.lo_j; j <= cb.hi_j; ++j)
        for (int i = cb.lo_i; i <= cb.hi_i; ++i)
          if (!mask[static_cast<std::size_t>(j) * cnx + i])
            throw GeometryError("level " + std::to_string(l) + " patch " + to_string(p.box()) +
                                " is not properly nested");
    }
  }
}

Hierarchy build_hierarchy(const Extent& domain, int coarse_nx, int coarse_ny,
                          const std::vector<RefinementRatio>& ratios, int num_layers) {
  Hierarchy h(LevelLadder(domain, coarse_nx, coarse_ny, ratios), num_layers);
  h.patches(1).emplace_back(1, h.ladder().domain_box(1), num_layers);
  return h;
}

}  // namespace mlamr
