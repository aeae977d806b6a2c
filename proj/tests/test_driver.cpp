#include <cmath>

#include "doctest.h"
#include "mlamr/driver.hpp"
#include "mlamr/io/frame.hpp"
#include "mlamr/regrid.hpp"
#include "support/fixtures.hpp"

using namespace mlamr;
using namespace mlamr::testing;

namespace {

// The demo on a 50 x 8 coarse grid with two levels of ratio 2.
io::RunConfig small_demo() {
  io::RunConfig cfg = demo_config();
  cfg.settings.coarse_nx = 50;
  cfg.settings.coarse_ny = 8;
  cfg.settings.ratios = {RefinementRatio::isotropic(2), RefinementRatio::isotropic(2)};
  cfg.settings.final_time = 0.5;
  cfg.settings.frame_times = {0.0, 0.25, 0.5};
  return cfg;
}

double max_rest_error(const Hierarchy& h, const io::Scenario& sc, const LayerParams& params) {
  double worst = 0.0;
  for (int l = 1; l <= h.active_levels(); ++l)
    for (const Patch& p : h.patches(l)) {
      const IndexBox b = p.box();
      for (int j = b.lo_j; j <= b.hi_j; ++j)
        for (int i = b.lo_i; i <= b.hi_i; ++i) {
          const CellState c = p.cell(i, j);
          const SurfaceSet s = surfaces_from_state(c);
          const SurfaceSet rest = sc.rest_surfaces(c.bathy, params);
          for (int m = 0; m < c.num_layers; ++m) {
            worst = std::max(worst, std::fabs(s.eta[m] - rest.eta[m]));
            worst = std::max({worst, std::fabs(c.hu[m]), std::fabs(c.hv[m])});
          }
        }
    }
  return worst;
}

}  // namespace

TEST_CASE("settings are validated") {
  io::RunConfig cfg = small_demo();
  cfg.settings.cfl = 1.5;
  CHECK_THROWS(Simulation(cfg.settings, cfg.scenario));
  cfg = small_demo();
  cfg.settings.workers = 0;
  CHECK_THROWS(Simulation(cfg.settings, cfg.scenario));
}

TEST_CASE("single level counts every cell every step") {
  io::RunConfig cfg = io::uniform_equivalent(small_demo());
  CHECK(cfg.settings.coarse_nx == 200);
  Simulation sim(cfg.settings, cfg.scenario);
  sim.initialize();
  const RunStats st = sim.run();
  CHECK(st.num_levels == 1);
  CHECK(st.coarse_steps > 0);
  CHECK(st.total_cell_updates == 200LL * 32 * st.coarse_steps);
  CHECK(st.final_time == 0.5);
  CHECK(st.regrids == 0);
}

TEST_CASE("subcycling") {
  io::RunConfig cfg = small_demo();
  cfg.settings.ratios = {RefinementRatio::isotropic(2)};
  cfg.settings.policy.regrid_interval = 1000000;
  Simulation sim(cfg.settings, cfg.scenario);
  sim.initialize();
  REQUIRE(sim.hierarchy().active_levels() == 2);
  std::int64_t fine_cells = 0;
  for (const Patch& p : sim.hierarchy().patches(2)) fine_cells += p.box().num_cells();
  for (int n = 1; n <= 5; ++n) {
    const double dt = sim.step(1.0);
    CHECK(dt > 0.0);
    CHECK(sim.level_time(2) == sim.level_time(1));
    for (const Patch& p : sim.hierarchy().patches(2)) CHECK(p.time == sim.time());
    CHECK(sim.stats().level_cell_updates[1] == 2 * n * fine_cells);
    CHECK(sim.stats().level_cell_updates[0] == n * 50LL * 8);
  }
}

TEST_CASE("final step lands on the final time") {
  io::RunConfig cfg = small_demo();
  cfg.settings.final_time = 0.3;
  cfg.settings.frame_times = {0.1, 0.3};
  Simulation sim(cfg.settings, cfg.scenario);
  sim.initialize();
  std::vector<double> seen;
  const RunStats st = sim.run([&](const Hierarchy&, double t) { seen.push_back(t); });
  CHECK(st.final_time == 0.3);
  REQUIRE(seen.size() == 2);
  CHECK(seen[0] == doctest::Approx(0.1).epsilon(1e-12));
  CHECK(seen[1] == 0.3);
}

TEST_CASE("lake at rest through the whole machinery") {
  io::RunConfig cfg = lake_config();
  Simulation sim(cfg.settings, cfg.scenario);
  sim.initialize();
  CHECK(sim.hierarchy().active_levels() == 3);
  for (int n = 0; n < 10; ++n) sim.step(1.0);
  CHECK(sim.stats().regrids > 0);
  CHECK(max_rest_error(sim.hierarchy(), cfg.scenario, cfg.settings.params) <= 1e-11);
}

TEST_CASE("mass accounting closes") {
  io::RunConfig cfg = small_demo();
  cfg.scenario.bc = {};
  cfg.settings.final_time = 1.0;
  Simulation sim(cfg.settings, cfg.scenario);
  sim.initialize();
  const RunStats st = sim.run();
  CHECK(st.regrids > 0);
  const LayerArray acc = st.accounted_mass();
  const LayerArray drift = st.mass_drift();
  for (int m = 0; m < 2; ++m) {
    CHECK(std::fabs(st.final_mass[m] - acc[m]) <= 1e-12 * st.initial_mass[m]);
    CHECK(st.boundary_delta[m] == 0.0);
    CHECK(std::fabs(drift[m]) <= 1e-3 * st.initial_mass[m]);
  }
  CHECK(st.final_mass[0] == doctest::Approx(composite_volume(sim.hierarchy())[0]).epsilon(1e-14));
}

TEST_CASE("outflow boundaries report their flux") {
  io::RunConfig cfg = small_demo();
  cfg.scenario.wave_center = 3.8;
  cfg.settings.final_time = 1.0;
  Simulation sim(cfg.settings, cfg.scenario);
  sim.initialize();
  const RunStats st = sim.run();
  CHECK(st.boundary_delta[0] < 0.0);
  const LayerArray acc = st.accounted_mass();
  for (int m = 0; m < 2; ++m) CHECK(std::fabs(st.final_mass[m] - acc[m]) <= 1e-12 * st.initial_mass[m]);
}

TEST_CASE("flag band follows a plane wave") {
  io::RunConfig cfg = small_demo();
  cfg.scenario.bed_shelf = -1.0;
  cfg.scenario.wave_amplitude = 0.05;
  cfg.scenario.wave_center = 0.8;
  cfg.scenario.wave_width = 0.3;
  cfg.settings.policy.wave_tolerance = {0.01, 0.05};
  cfg.settings.ratios = {RefinementRatio::isotropic(2)};
  Simulation sim(cfg.settings, cfg.scenario);
  sim.initialize();
  auto centroid = [&] {
    double sx = 0.0, n = 0.0;
    for (const Patch& p : sim.hierarchy().patches(2)) {
      const IndexBox b = p.box();
      sx += 0.5 * (sim.hierarchy().ladder().x_center(2, b.lo_i) + sim.hierarchy().ladder().x_center(2, b.hi_i)) *
            b.num_cells();
      n += b.num_cells();
    }
    return sx / n;
  };
  double last = centroid();
  const double first = last;
  while (sim.time() < 1.5) {
    sim.step(1.0);
    REQUIRE(sim.hierarchy().active_levels() == 2);
    const double c = centroid();
    CHECK(c >= last);
    last = c;
  }
  CHECK(last - first > 1.0);
}

TEST_CASE("runs are deterministic") {
  const io::RunConfig cfg = small_demo();
  auto run = [&](int workers, std::vector<io::Frame>& frames) {
    SimulationSettings s = cfg.settings;
    s.workers = workers;
    Simulation sim(s, cfg.scenario);
    sim.initialize();
    return sim.run([&](const Hierarchy& h, double t) { frames.push_back(io::make_frame(h, t)); });
  };
  std::vector<io::Frame> a, b, c;
  const RunStats sa = run(1, a);
  const RunStats sb = run(1, b);
  const RunStats sc = run(4, c);
  CHECK(sa.total_cell_updates == sb.total_cell_updates);
  CHECK(sa.total_cell_updates == sc.total_cell_updates);
  REQUIRE(a.size() == 3);
  REQUIRE(b.size() == 3);
  for (std::size_t k = 0; k < a.size(); ++k) {
    REQUIRE(a[k].patches.size() == b[k].patches.size());
    for (std::size_t p = 0; p < a[k].patches.size(); ++p) {
      CHECK(a[k].patches[p].box == b[k].patches[p].box);
      CHECK(a[k].patches[p].values == b[k].patches[p].values);
    }
  }
}
