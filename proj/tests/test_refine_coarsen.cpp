#include <cmath>
#include <random>

#include "doctest.h"
#include "mlamr/coarsen.hpp"
#include "mlamr/physics.hpp"
#include "mlamr/refine.hpp"
#include "support/fixtures.hpp"
#include "support/synthetic.hpp"

using namespace mlamr;
using namespace mlamr::testing;

namespace {

// Single-layer coarse row (constant in y) with surface values eta[0..n).
Patch row_patch(const std::vector<double>& eta) {
  const int n = static_cast<int>(eta.size());
  Patch p(1, IndexBox{0, 0, n - 1, 2}, 1);
  for (int j = -kGhostWidth; j <= 2 + kGhostWidth; ++j)
    for (int i = -kGhostWidth; i < n + kGhostWidth; ++i) {
      const int k = std::clamp(i, 0, n - 1);
      p.bathy(i, j) = -1.0;
      p.h(0, i, j) = eta[static_cast<std::size_t>(k)] + 1.0;
    }
  return p;
}

}  // namespace

TEST_CASE("minmod") {
  CHECK(minmod(1.0, 2.0) == 1.0);
  CHECK(minmod(1.0, -2.0) == 0.0);
  CHECK(minmod(-3.0, -1.0) == -1.0);
  CHECK(minmod(0.0, 5.0) == 0.0);
  CHECK(minmod(2.0, 2.0) == 2.0);
}

TEST_CASE("fine offsets") {
  CHECK(fine_offset(2, 2) == -0.25);
  CHECK(fine_offset(3, 2) == 0.25);
  CHECK(fine_offset(4, 4) == -0.375);
  CHECK(fine_offset(-1, 4) == 0.375);
}

TEST_CASE("linear surface interpolation") {
  const RefinementRatio r{2, 2, 2};
  SUBCASE("constant surface") {
    const Patch p = row_patch({0.3, 0.3, 0.3});
    const auto eta = interpolate_layer_surface(p.view(), 0, IndexBox{0, 0, 5, 5}, r, 1.0, 1.0, 1e-3);
    for (double e : eta) CHECK(e == doctest::Approx(0.3).epsilon(1e-15));
  }
  SUBCASE("ramp") {
    const Patch p = row_patch({0.0, 0.1, 0.2});
    const auto eta = interpolate_layer_surface(p.view(), 0, IndexBox{2, 2, 3, 3}, r, 1.0, 1.0, 1e-3);
    CHECK(eta[0] == doctest::Approx(0.075));
    CHECK(eta[1] == doctest::Approx(0.125));
    CHECK(eta[2] == doctest::Approx(0.075));
  }
  SUBCASE("local maximum") {
    const Patch p = row_patch({0.0, 0.5, 0.0});
    const SlopePair s = surface_slopes(p.view(), 0, 1, 1, 1.0, 1.0, 1e-3);
    CHECK(s.sx == 0.0);
    const auto eta = interpolate_layer_surface(p.view(), 0, IndexBox{2, 2, 3, 2}, r, 1.0, 1.0, 1e-3);
    CHECK(eta[0] == 0.5);
    CHECK(eta[1] == 0.5);
  }
  SUBCASE("dry neighbour disables the slope") {
    Patch p = row_patch({0.0, 0.1, 0.2});
    for (int j = -kGhostWidth; j <= 2 + kGhostWidth; ++j) p.h(0, 0, j) = 0.0;
    CHECK(surface_slopes(p.view(), 0, 1, 1, 1.0, 1.0, 1e-3).sx == 0.0);
  }
}

TEST_CASE("refinement keeps a lake at rest over the shelf") {
  const io::RunConfig cfg = lake_config();
  Hierarchy h = single_level(cfg);
  const Patch& coarse = h.patches(1).front();
  const RefinementRatio r = RefinementRatio::isotropic(4);
  LevelLadder ladder(cfg.settings.domain, cfg.settings.coarse_nx, cfg.settings.coarse_ny, {r});
  // straddles the step at x = 2.5 (coarse column 125)
  Patch fine(2, IndexBox{480, 80, 519, 119}, 2);
  fill_bathymetry(fine, ladder, cfg.scenario);
  const double dx = h.ladder().level(1).dx, dy = h.ladder().level(1).dy;
  refine_patch(coarse.view(), fine, r, dx, dy, cfg.settings.params);
  bool saw_dry = false, saw_wet = false;
  for (int j = 80; j <= 119; ++j)
    for (int i = 480; i <= 519; ++i) {
      const CellState c = fine.cell(i, j);
      const SurfaceSet s = surfaces_from_state(c);
      REQUIRE(s.eta[0] == doctest::Approx(0.0).epsilon(1e-14));
      if (c.h[1] > 0.0) REQUIRE(s.eta[1] == doctest::Approx(-0.6).epsilon(1e-14));
      REQUIRE(c.hu[0] == 0.0);
      REQUIRE(c.hv[1] == 0.0);
      saw_dry = saw_dry || c.h[1] == 0.0;
      saw_wet = saw_wet || c.h[1] > 0.0;
    }
  CHECK(saw_dry);
  CHECK(saw_wet);

  // the refined state is a fixed point of the solver
  Hierarchy fh(LevelLadder(cfg.settings.domain, cfg.settings.coarse_nx, cfg.settings.coarse_ny, {r}), 2);
  fh.patches(1).push_back(coarse);
  fh.patches(2).push_back(fine);
  Patch& f = fh.patches(2).front();
  fill_patch(f, fh, 2, 1.0, cfg.scenario.boundaries(), cfg.settings.params);
  const Patch before = f;
  step_patch(f, 0.2 * dx, cfg.settings.params, dx / 4, dy / 4, true);
  double worst = 0.0;
  for (int j = 80; j <= 119; ++j)
    for (int i = 480; i <= 519; ++i)
      for (int c = 1; c < 7; ++c)
        worst = std::max(worst, std::fabs(f.component(c)[f.index(i, j)] - before.component(c)[before.index(i, j)]));
  CHECK(worst <= 1e-12);
}

TEST_CASE("refinement conserves mass on wet cells") {
  std::mt19937_64 rng(11);
  const RefinementRatio r{4, 2, 4};
  for (int trial = 0; trial < 20; ++trial) {
    const Patch coarse = random_wet_patch(rng, IndexBox{0, 0, 7, 7}, 2);
    Patch fine(2, IndexBox{4, 2, 27, 13}, 2);
    telescoping_bathymetry(rng, coarse.view(), fine, r);
    const RefineResult res = refine_patch(coarse.view(), fine, r, 0.5, 0.25, LayerParams::two_layer(0.9));
    CHECK(res.cells == 24 * 12);
    for (int m = 0; m < 2; ++m) CHECK(std::fabs(res.mass_delta[m]) <= 1e-13);
    for (int cj = 1; cj <= 6; ++cj)
      for (int ci = 1; ci <= 6; ++ci) {
        const IndexBox b = fine_cells_of(ci, cj, r);
        for (int m = 0; m < 2; ++m) {
          double mean = 0.0;
          for (int j = b.lo_j; j <= b.hi_j; ++j)
            for (int i = b.lo_i; i <= b.hi_i; ++i) mean += fine.h(m, i, j);
          mean /= 8.0;
          REQUIRE(std::fabs(mean - coarse.h(m, ci, cj)) <= 1e-13 * coarse.h(m, ci, cj));
        }
      }
  }
}

TEST_CASE("refinement needs coarse data around the footprint") {
  std::mt19937_64 rng(3);
  const Patch coarse = random_wet_patch(rng, IndexBox{0, 0, 7, 7}, 1);
  Patch fine(2, IndexBox{-8, 0, 7, 7}, 1);
  CHECK_THROWS_AS(refine_patch(coarse.view(), fine, RefinementRatio::isotropic(2), 1.0, 1.0,
                               LayerParams::single_layer()),
                  GeometryError);
}

TEST_CASE("averaging down") {
  const RefinementRatio r1{2, 1, 2};
  Patch coarse(1, IndexBox{0, 0, 0, 0}, 1);
  Patch fine(2, IndexBox{0, 0, 1, 0}, 1);
  fine.h(0, 0, 0) = 0.3;
  fine.h(0, 1, 0) = 0.5;
  fine.hu(0, 0, 0) = 0.1;
  fine.hu(0, 1, 0) = 0.3;
  average_down(fine, coarse, r1, 1.0, 1.0, 1e-3);
  CHECK(coarse.h(0, 0, 0) == doctest::Approx(0.4));
  CHECK(coarse.hu(0, 0, 0) == doctest::Approx(0.2));

  const RefinementRatio r2 = RefinementRatio::isotropic(2);
  Patch c2(1, IndexBox{0, 0, 1, 1}, 1);
  c2.h(0, 1, 1) = 9.0;
  Patch f2(2, IndexBox{0, 0, 1, 1}, 1);
  f2.h(0, 0, 0) = 0.1;
  f2.h(0, 1, 0) = 0.2;
  f2.h(0, 0, 1) = 0.3;
  f2.h(0, 1, 1) = 0.4;
  f2.hu(0, 0, 0) = 1e-4;
  const CoarsenResult res = average_down(f2, c2, r2, 1.0, 1.0, 0.5);
  CHECK(res.cells_updated == 1);
  CHECK(c2.h(0, 0, 0) == doctest::Approx(0.25));
  CHECK(c2.hu(0, 0, 0) == 0.0);  // averaged depth is below the dry tolerance
  CHECK(c2.h(0, 1, 1) == 9.0);
  CHECK(res.mass_delta[0] == doctest::Approx(0.25));

  f2.time = 1.0;
  CHECK_THROWS_AS(average_down(f2, c2, r2, 1.0, 1.0, 0.5), NumericalError);
}

TEST_CASE("average of a refinement is the original") {
  std::mt19937_64 rng(5);
  const RefinementRatio r = RefinementRatio::isotropic(4);
  for (int trial = 0; trial < 20; ++trial) {
    const Patch coarse = random_wet_patch(rng, IndexBox{0, 0, 7, 7}, 2);
    Patch fine(2, IndexBox{4, 4, 27, 27}, 2);
    telescoping_bathymetry(rng, coarse.view(), fine, r);
    refine_patch(coarse.view(), fine, r, 0.25, 0.25, LayerParams::two_layer(0.9));
    Patch back = coarse;
    average_down(fine, back, r, 0.25, 0.25, 1e-3);
    for (int c = 1; c < 7; ++c) {
      double scale = 0.0;  // momenta may pass through zero; compare against their magnitude
      for (int j = 1; j <= 6; ++j)
        for (int i = 1; i <= 6; ++i) scale = std::max(scale, std::fabs(coarse.component(c)[coarse.index(i, j)]));
      for (int j = 1; j <= 6; ++j)
        for (int i = 1; i <= 6; ++i) {
          const double a = coarse.component(c)[coarse.index(i, j)];
          const double b = back.component(c)[back.index(i, j)];
          REQUIRE(std::fabs(a - b) <= 1e-13 * (c % 3 == 1 ? std::fabs(a) : scale));
        }
    }
  }
}
