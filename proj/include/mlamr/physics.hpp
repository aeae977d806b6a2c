#pragma once

#include <cstdint>
#include <stdexcept>
#include <vector>

#include "mlamr/mesh.hpp"
#include "mlamr/state.hpp"

namespace mlamr {

class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class CflViolation : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

enum class BoundaryKind { wall, outflow };

struct BoundarySet {
  BoundaryKind left = BoundaryKind::wall;
  BoundaryKind right = BoundaryKind::wall;
  BoundaryKind bottom = BoundaryKind::wall;
  BoundaryKind top = BoundaryKind::wall;
};

/// Depth added to one interior cell by clipping a negative value to zero.
struct ClipEvent {
  int i = 0;
  int j = 0;
  int layer = 0;
  double volume = 0.0;
};

struct StepResult {
  double max_wave_speed = 0.0;
  double max_courant = 0.0;
  std::int64_t cells_updated = 0;
  LayerArray mass_delta{};  // net interior volume change per layer
  LayerArray clip_mass{};   // volume added by clipping negative depths
  std::vector<ClipEvent> clips;
  int hyperbolicity_warnings = 0;
  int prefix_violations = 0;

  void merge(const StepResult& o);
};

/// sqrt(g * (h1 + h2)): the approximate external (barotropic) speed.
double external_wave_speed(double total_depth, double gravity);

/// sqrt(g (1 - r) h1 h2 / (h1 + h2)): the approximate internal speed.
double internal_wave_speed(double h_top, double h_bottom, double gravity, double density_ratio);

/// Advances the patch interior by dt with first-order HLL fluxes on the
/// hydrostatically reconstructed layers, x then y (or y then x when
/// `x_first` is false). Ghost cells must be filled at the patch's time.
/// Face mass fluxes of the interior are left in `patch.flux`.
/// Throws CflViolation when a face speed exceeds dx / dt.
StepResult step_patch(Patch& patch, double dt, const LayerParams& params, double dx, double dy,
                      bool x_first);

/// cfl_target * min(dx, dy) / (max |u| + max sqrt(g H)) over the interior and one
/// ghost ring, or dt_max when dry.
double stable_dt(const Patch& patch, const LayerParams& params, double dx, double dy,
                 double cfl_target, double dt_max);

/// Fills ghost cells lying outside `domain_box` by reflection (walls) or copy (outflow).
void fill_physical_boundaries(Patch& patch, const IndexBox& domain_box, const BoundarySet& bc);

/// Total interior volume of layer m.
double layer_volume(const Patch& patch, int m, double dx, double dy);

}  // namespace mlamr
