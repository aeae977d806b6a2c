#pragma once

#include <cstdint>
#include <vector>

#include "mlamr/mesh.hpp"
#include "mlamr/setup.hpp"
#include "mlamr/state.hpp"

namespace mlamr {

/// Per-cell refinement flags over a whole level's index space.
struct FlagMap {
  IndexBox box;
  int buffer_width = 0;
  std::vector<std::uint8_t> flags;

  FlagMap() = default;
  FlagMap(IndexBox b, int buffer);

  bool get(int i, int j) const {
    return box.contains(i, j) && flags[offset(i, j)] != 0;
  }
  void set(int i, int j, bool v = true) { flags[offset(i, j)] = v ? 1 : 0; }
  std::int64_t count() const;
  std::size_t offset(int i, int j) const {
    return static_cast<std::size_t>(j - box.lo_j) * static_cast<std::size_t>(box.nx()) +
           static_cast<std::size_t>(i - box.lo_i);
  }
  /// Chebyshev dilation by n cells, clipped to the box.
  void dilate(int n);
};

struct RegridPolicy {
  std::vector<double> wave_tolerance{1e-2, 5e-2};  // per layer, top first
  int regrid_interval = 2;
  int buffer_width = 2;
  double efficiency_target = 0.7;
  bool flag_fronts = true;
  std::vector<Extent> allowed_regions;  // empty: everywhere

  void validate() const;
  double tolerance(int m) const;
};

/// Flags cells whose surface departs from the equilibrium by more than the
/// layer's tolerance, plus wet cells within buffer_width of a wet/dry front;
/// then dilates by buffer_width and clears cells outside the allowed regions.
FlagMap flag_cells(const Hierarchy& hierarchy, int l, const RegridPolicy& policy,
                   const ProblemSetup& setup, const LayerParams& params);

/// Recursive bisection on flag signatures (holes first, then the strongest
/// Laplacian inflection, then halving). Every returned box holds at least
/// `efficiency` flagged cells or is a single cell; flagged cells outside
/// `allowed` (when given) are dropped and no box covers a disallowed cell.
std::vector<IndexBox> cluster_flags(const FlagMap& flags, double efficiency,
                                    const std::vector<std::uint8_t>* allowed = nullptr);

enum class NewCellSource { interpolate, initial_condition };

struct RegridReport {
  LayerArray mass_delta{};  // composite volume after minus before
  std::int64_t cells_copied = 0;
  std::int64_t cells_interpolated = 0;
  std::int64_t cells_initialized = 0;
  bool changed = false;
};

/// Rebuilds levels l+1 .. max from flags on level l (then on each new level).
/// Overlapping cells are copied from the old fine patches, the rest come from
/// refine_patch (or the initial condition). Ghost frames of the new patches are
/// filled and coarse data under them is averaged down before returning.
RegridReport regrid_level(Hierarchy& hierarchy, int l, const RegridPolicy& policy,
                          const ProblemSetup& setup, const LayerParams& params,
                          NewCellSource source = NewCellSource::interpolate);

/// Composite volume per layer: each cell counted on the finest level covering it.
LayerArray composite_volume(const Hierarchy& hierarchy);

}  // namespace mlamr
