#pragma once

#include <random>

#include "mlamr/mesh.hpp"
#include "mlamr/state.hpp"

namespace mlamr::testing {

// Coarse patch (ghosts included) with every layer wet: surfaces are a smooth
// field plus noise, depths at least `min_depth`, momenta of either sign with
// magnitudes in [0.1, 0.4].
inline Patch random_wet_patch(std::mt19937_64& rng, const IndexBox& box, int layers,
                              double min_depth = 0.5) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::uniform_real_distribution<double> extra(0.0, 0.2);
  std::uniform_real_distribution<double> mag(0.1, 0.4);
  auto momentum = [&] { return u(rng) < 0.0 ? -mag(rng) : mag(rng); };
  Patch p(1, box, layers);
  const double ax = 0.02 * u(rng), ay = 0.02 * u(rng);
  const IndexBox g = p.ghost_box();
  for (int j = g.lo_j; j <= g.hi_j; ++j) {
    for (int i = g.lo_i; i <= g.hi_i; ++i) {
      p.bathy(i, j) = -2.0 + 0.02 * u(rng);
      for (int m = layers - 1; m >= 0; --m) {
        p.h(m, i, j) = min_depth + extra(rng) + ax * i + ay * j;
        p.hu(m, i, j) = momentum();
        p.hv(m, i, j) = momentum();
      }
    }
  }
  return p;
}

// Fine bathymetry whose block means equal the coarse values: each coarse value
// plus a zero-mean perturbation of size `amp`.
inline void telescoping_bathymetry(std::mt19937_64& rng, const PatchView& coarse, Patch& fine,
                                   const RefinementRatio& r, double amp = 0.05) {
  std::uniform_real_distribution<double> u(-amp, amp);
  const IndexBox cb = fine.box().coarsened(r.x, r.y);
  for (int cj = cb.lo_j; cj <= cb.hi_j; ++cj) {
    for (int ci = cb.lo_i; ci <= cb.hi_i; ++ci) {
      const IndexBox block = fine_cells_of(ci, cj, r);
      double mean = 0.0;
      for (int j = block.lo_j; j <= block.hi_j; ++j)
        for (int i = block.lo_i; i <= block.hi_i; ++i) {
          fine.bathy(i, j) = u(rng);
          mean += fine.bathy(i, j);
        }
      mean /= static_cast<double>(block.num_cells());
      for (int j = block.lo_j; j <= block.hi_j; ++j)
        for (int i = block.lo_i; i <= block.hi_i; ++i)
          fine.bathy(i, j) += coarse.bathy(ci, cj) - mean;
    }
  }
}

}  // namespace mlamr::testing
