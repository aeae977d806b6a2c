#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "mlamr/state.hpp"

namespace mlamr {

inline constexpr int kGhostWidth = 2;

class GeometryError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class NotRefinedError : public GeometryError {
 public:
  using GeometryError::GeometryError;
};

/// Inclusive cell-index rectangle in one level's global index space.
struct IndexBox {
  int lo_i = 0;
  int lo_j = 0;
  int hi_i = -1;
  int hi_j = -1;

  int nx() const { return hi_i - lo_i + 1; }
  int ny() const { return hi_j - lo_j + 1; }
  bool empty() const { return hi_i < lo_i || hi_j < lo_j; }
  std::int64_t num_cells() const {
    return empty() ? 0 : static_cast<std::int64_t>(nx()) * ny();
  }
  bool contains(int i, int j) const {
    return i >= lo_i && i <= hi_i && j >= lo_j && j <= hi_j;
  }
  bool contains(const IndexBox& o) const {
    return o.empty() || (o.lo_i >= lo_i && o.hi_i <= hi_i && o.lo_j >= lo_j && o.hi_j <= hi_j);
  }
  bool intersects(const IndexBox& o) const { return !intersect(o).empty(); }

  IndexBox grown(int n) const { return {lo_i - n, lo_j - n, hi_i + n, hi_j + n}; }
  IndexBox intersect(const IndexBox& o) const;
  IndexBox refined(int rx, int ry) const;
  IndexBox coarsened(int rx, int ry) const;

  friend bool operator==(const IndexBox&, const IndexBox&) = default;
};

std::string to_string(const IndexBox& b);

/// Physical rectangle [x_lower, x_upper] x [y_lower, y_upper].
struct Extent {
  double x_lower = 0.0;
  double x_upper = 1.0;
  double y_lower = 0.0;
  double y_upper = 1.0;

  double width() const { return x_upper - x_lower; }
  double height() const { return y_upper - y_lower; }
};

/// Integer space/time factors between a level and the next finer one.
struct RefinementRatio {
  int x = 2;
  int y = 2;
  int t = 2;

  /// Ratio with r_t = max(r_x, r_y), the CFL-respecting default.
  static RefinementRatio isotropic(int r) { return {r, r, r}; }
  static RefinementRatio with_default_time(int rx, int ry) { return {rx, ry, rx > ry ? rx : ry}; }
};

/// One rung of the level ladder. Ratios point to the next finer level and are 1 on the finest.
struct LevelSpec {
  int level_index = 1;
  int nx = 0;
  int ny = 0;
  double dx = 0.0;
  double dy = 0.0;
  int r_x = 1;
  int r_y = 1;
  int r_t = 1;

  RefinementRatio ratio() const { return {r_x, r_y, r_t}; }
};

/// Geometry of every level. Cell sizes come from the level-1 size divided by
/// the integer product of ratios, never by repeated division.
class LevelLadder {
 public:
  LevelLadder() = default;
  LevelLadder(Extent domain, int coarse_nx, int coarse_ny, std::vector<RefinementRatio> ratios);

  int num_levels() const { return static_cast<int>(levels_.size()); }
  const LevelSpec& level(int l) const { return levels_.at(static_cast<std::size_t>(l - 1)); }
  const Extent& domain() const { return domain_; }
  IndexBox domain_box(int l) const { return {0, 0, level(l).nx - 1, level(l).ny - 1}; }

  double x_center(int l, int i) const { return domain_.x_lower + (i + 0.5) * level(l).dx; }
  double y_center(int l, int j) const { return domain_.y_lower + (j + 0.5) * level(l).dy; }
  double x_edge(int l, int i) const { return domain_.x_lower + i * level(l).dx; }
  double y_edge(int l, int j) const { return domain_.y_lower + j * level(l).dy; }

 private:
  Extent domain_{};
  std::vector<LevelSpec> levels_;
};

/// Level-l cell that contains fine cell `fine` of level l+1 (one axis).
inline int coarse_cell_of(int fine, int ratio) {
  return fine >= 0 ? fine / ratio : -((-fine + ratio - 1) / ratio);
}

/// The fine block Gamma_k covering coarse cell (i, j): exactly r_x * r_y cells.
inline IndexBox fine_cells_of(int i, int j, const RefinementRatio& r) {
  return IndexBox{i, j, i, j}.refined(r.x, r.y);
}

/// Non-owning read-only view of a patch's cell data (current or saved copy).
struct PatchView {
  IndexBox box;
  int ghost = kGhostWidth;
  int num_layers = 1;
  std::span<const double> data;

  IndexBox ghost_box() const { return box.grown(ghost); }
  int stride() const { return box.nx() + 2 * ghost; }
  std::size_t cells_with_ghosts() const {
    return static_cast<std::size_t>(stride()) * static_cast<std::size_t>(box.ny() + 2 * ghost);
  }
  std::size_t index(int i, int j) const {
    return static_cast<std::size_t>(j - box.lo_j + ghost) * static_cast<std::size_t>(stride()) +
           static_cast<std::size_t>(i - box.lo_i + ghost);
  }
  double get(int comp, int i, int j) const {
    return data[static_cast<std::size_t>(comp) * cells_with_ghosts() + index(i, j)];
  }
  double bathy(int i, int j) const { return get(0, i, j); }
  double h(int m, int i, int j) const { return get(1 + 3 * m, i, j); }
  double hu(int m, int i, int j) const { return get(2 + 3 * m, i, j); }
  double hv(int m, int i, int j) const { return get(3 + 3 * m, i, j); }
  CellState cell(int i, int j) const;
};

/// Time-integrated per-layer mass fluxes through the faces of a patch's last step.
/// x faces: (nx + 1) * ny, y faces: nx * (ny + 1); values are dt * flux * face length.
struct FaceMassFlux {
  std::vector<double> x;
  std::vector<double> y;
};

/// Per-layer inflow accumulated along the four sides of a patch over several steps.
struct SideAccumulator {
  std::vector<double> left, right, bottom, top;  // [layer * side_length + k]
  void reset(int num_layers, int nx, int ny);
};

/// Logically rectangular block of cells on one level with a ghost frame.
/// Layer 0 is the top layer. Components are stored component-major:
/// bathymetry, then (h, hu, hv) for each layer.
class Patch {
 public:
  Patch() = default;
  Patch(int level, IndexBox box, int num_layers);

  int level() const { return level_; }
  const IndexBox& box() const { return box_; }
  int ghost() const { return kGhostWidth; }
  int num_layers() const { return num_layers_; }
  int num_components() const { return 1 + 3 * num_layers_; }
  IndexBox ghost_box() const { return box_.grown(kGhostWidth); }
  int stride() const { return box_.nx() + 2 * kGhostWidth; }
  std::size_t cells_with_ghosts() const { return cells_; }

  std::size_t index(int i, int j) const {
    return static_cast<std::size_t>(j - box_.lo_j + kGhostWidth) * static_cast<std::size_t>(stride()) +
           static_cast<std::size_t>(i - box_.lo_i + kGhostWidth);
  }

  double* component(int c) { return data_.data() + static_cast<std::size_t>(c) * cells_; }
  const double* component(int c) const { return data_.data() + static_cast<std::size_t>(c) * cells_; }

  double& bathy(int i, int j) { return component(0)[index(i, j)]; }
  double bathy(int i, int j) const { return component(0)[index(i, j)]; }
  double& h(int m, int i, int j) { return component(1 + 3 * m)[index(i, j)]; }
  double h(int m, int i, int j) const { return component(1 + 3 * m)[index(i, j)]; }
  double& hu(int m, int i, int j) { return component(2 + 3 * m)[index(i, j)]; }
  double hu(int m, int i, int j) const { return component(2 + 3 * m)[index(i, j)]; }
  double& hv(int m, int i, int j) { return component(3 + 3 * m)[index(i, j)]; }
  double hv(int m, int i, int j) const { return component(3 + 3 * m)[index(i, j)]; }

  CellState cell(int i, int j) const;
  void set_cell(int i, int j, const CellState& s);

  std::span<double> data() { return data_; }
  std::span<const double> data() const { return data_; }
  PatchView view() const { return {box_, kGhostWidth, num_layers_, data_}; }

  /// Keeps a copy of the current data (ghosts included) for time interpolation.
  void save_old() { old_ = data_; }
  bool has_old() const { return !old_.empty(); }
  PatchView old_view() const { return {box_, kGhostWidth, num_layers_, old_}; }

  double time = 0.0;
  FaceMassFlux flux;
  SideAccumulator sides;

 private:
  int level_ = 1;
  IndexBox box_{};
  int num_layers_ = 1;
  std::size_t cells_ = 0;
  std::vector<double> data_;
  std::vector<double> old_;
};

/// Ladder of levels plus the patches currently living on each level.
class Hierarchy {
 public:
  Hierarchy() = default;
  Hierarchy(LevelLadder ladder, int num_layers);

  const LevelLadder& ladder() const { return ladder_; }
  int max_levels() const { return ladder_.num_levels(); }
  /// Number of levels that currently hold patches (level 1 always does).
  int active_levels() const;
  int num_layers() const { return num_layers_; }

  std::vector<Patch>& patches(int l) { return patches_.at(static_cast<std::size_t>(l - 1)); }
  const std::vector<Patch>& patches(int l) const { return patches_.at(static_cast<std::size_t>(l - 1)); }

  /// Fine cells of level l+1 covering level-l cell (i, j); throws NotRefinedError when uncovered.
  IndexBox fine_cells_of(int l, int i, int j) const;
  /// True when level-l cell (i, j) lies under some level-(l+1) patch.
  bool covered_by_finer(int l, int i, int j) const;
  /// Index of the level-l patch whose interior holds (i, j), or -1.
  int find_patch(int l, int i, int j) const;

  /// Throws GeometryError if same-level overlap or proper nesting (with the
  /// one-cell buffer away from the physical boundary) is violated.
  void check_nesting() const;

 private:
  LevelLadder ladder_;
  int num_layers_ = 1;
  std::vector<std::vector<Patch>> patches_;
};

/// Builds the ladder and allocates the single static level-1 patch.
Hierarchy build_hierarchy(const Extent& domain, int coarse_nx, int coarse_ny,
                          const std::vector<RefinementRatio>& ratios, int num_layers);

/// Cells of level l that a level-(l+1) patch may cover: the union of level-l
/// patch interiors eroded by one cell, except along the physical boundary.
std::vector<std::uint8_t> nesting_mask(const Hierarchy& h, int l);

}  // namespace mlamr
