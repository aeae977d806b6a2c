#pragma once

#include <vector>

#include "mlamr/mesh.hpp"
#include "mlamr/state.hpp"

namespace mlamr {

struct CoarsenResult {
  std::int64_t cells_updated = 0;
  LayerArray mass_delta{};  // change of coarse volume under the fine patches
};

/// Replaces each coarse cell under `fine` with the mean of its r_x * r_y fine
/// cells, for every conserved component of every layer. Bathymetry is left as is.
/// Throws NumericalError when the two patches are not at the same time.
CoarsenResult average_down(const Patch& fine, Patch& coarse, const RefinementRatio& r,
                           double coarse_dx, double coarse_dy, double dry_tolerance);

/// All fine patches of level l+1 onto all coarse patches of level l.
CoarsenResult average_down(const std::vector<Patch>& fine, std::vector<Patch>& coarse,
                           const RefinementRatio& r, double coarse_dx, double coarse_dy,
                           double dry_tolerance);

}  // namespace mlamr
