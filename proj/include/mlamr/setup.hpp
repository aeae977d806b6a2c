#pragma once

#include "mlamr/mesh.hpp"
#include "mlamr/physics.hpp"
#include "mlamr/state.hpp"

namespace mlamr {

/// What the AMR machinery needs to know about a problem: the bed, the initial
/// state, the equilibrium it perturbs, and the physical boundaries.
class ProblemSetup {
 public:
  virtual ~ProblemSetup() = default;

  /// Mean bed elevation over the rectangle [x0, x1] x [y0, y1].
  virtual double bathymetry_average(double x0, double x1, double y0, double y1) const = 0;
  /// Initial conserved state at a cell center with the given bed.
  virtual CellState initial_state(double x, double y, double bathy,
                                  const LayerParams& params) const = 0;
  /// Equilibrium surfaces over the given bed (used by the flagging criterion).
  virtual SurfaceSet rest_surfaces(double bathy, const LayerParams& params) const = 0;
  virtual BoundarySet boundaries() const = 0;
};

/// Sets bathymetry on every in-domain cell of the patch (ghosts included) as the
/// mean over the finest-level cells it contains, so each coarse value is the
/// mean of its children.
void fill_bathymetry(Patch& patch, const LevelLadder& ladder, const ProblemSetup& setup);

/// Sets the interior from the initial condition sampled at cell centers.
void fill_initial_state(Patch& patch, const LevelLadder& ladder, const ProblemSetup& setup,
                        const LayerParams& params);

/// Fills the ghost frame of `target` (a level-l patch, or the whole box when
/// `include_interior` is set): copies from other level-l patches first, then
/// interpolates from level l-1 blended between its saved and current data with
/// weight `alpha` on the current data, then applies physical boundaries.
void fill_patch(Patch& target, const Hierarchy& hierarchy, int l, double alpha,
                const BoundarySet& bc, const LayerParams& params, bool include_interior = false);

}  // namespace mlamr
