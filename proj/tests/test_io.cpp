#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "doctest.h"
#include "mlamr/io/config.hpp"
#include "mlamr/io/frame.hpp"
#include "mlamr/io/report.hpp"
#include "support/fixtures.hpp"

using namespace mlamr;
using namespace mlamr::testing;
namespace fs = std::filesystem;

namespace {

std::string tmp_path(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / "mlamr_unit";
  fs::create_directories(dir);
  return (dir / name).string();
}

std::string echo(const io::RunConfig& cfg) {
  std::ostringstream os;
  io::echo_config(cfg, os);
  return os.str();
}

std::string config_error_key(const std::string& text) {
  try {
    io::parse_config_text(text);
  } catch (const io::ConfigError& e) {
    return e.key();
  }
  return "";
}

}  // namespace

TEST_CASE("shipped demo configuration") {
  const io::RunConfig cfg = demo_config();
  CHECK(cfg.settings.ratios.size() == 2);
  for (const auto& r : cfg.settings.ratios) {
    CHECK(r.x == 4);
    CHECK(r.y == 4);
    CHECK(r.t == 4);
  }
  CHECK(cfg.settings.coarse_nx == 200);
  CHECK(cfg.settings.coarse_ny == 50);
  CHECK(cfg.settings.params.num_layers == 2);
  CHECK(cfg.settings.params.density_ratio() == doctest::Approx(0.95));
  CHECK(cfg.scenario.bed_deep == -1.0);
  CHECK(cfg.scenario.sea_level == 0.0);
  CHECK(cfg.amr);
  const std::string out = echo(cfg);
  CHECK(out.find("# r = (4,4), levels = 3") != std::string::npos);
  CHECK(out.find("[amr]") != std::string::npos);
}

TEST_CASE("configuration errors name the key") {
  CHECK(config_error_key("[amr]\nlevels = 2\nratio_x = 1\n") == "amr.ratio_x[0]");
  CHECK(config_error_key("[amr]\nlevels = 3\nratio_x = 4, 1\n") == "amr.ratio_x[1]");
  CHECK(config_error_key("[amr]\nlevels = 3\nratio_x = 4\n") == "amr.ratio_x");
  CHECK(config_error_key("[physics]\ncfl = 1.5\n") == "physics.cfl");
  CHECK(config_error_key("[physics]\nlayers = 3\n") == "physics.layers");
  CHECK(config_error_key("[physics]\ndensity_ratio = 1\n") == "physics.density_ratio");
  CHECK(config_error_key("[physics]\nbogus = 1\n") == "physics.bogus");
  CHECK(config_error_key("[amr]\nwave_tolerance = 0.1, -2\n") == "amr.wave_tolerance");
  CHECK(config_error_key("[scenario]\nbc_left = sticky\n") == "scenario.bc_left");
  CHECK(config_error_key("[scenario]\nframe_times = 2, 1\n") == "scenario.frame_times");
  CHECK(config_error_key("[scenario]\nfinal_time = 1\nframe_times = 2\n") == "scenario.frame_times");
  CHECK(config_error_key("[physics]\ngravity = fast\n") == "physics.gravity");
  CHECK(config_error_key("[physics]\ngravity = 1\ngravity = 2\n") == "physics.gravity");
  CHECK(config_error_key("[scenario]\ninterface_level = 0.5\n") == "scenario");
  try {
    io::parse_config_text("[amr]\nlevels = 2\nratio_x = 1\n", "bad.cfg");
    FAIL("expected an error");
  } catch (const io::ConfigError& e) {
    CHECK(std::string(e.what()).find("amr.ratio_x") != std::string::npos);
  }
}

TEST_CASE("missing wave tolerance takes the default") {
  const io::RunConfig cfg = io::parse_config_text("[amr]\nlevels = 2\nratio_x = 2\nratio_y = 2\n");
  CHECK(cfg.settings.policy.tolerance(0) == 1e-2);
  CHECK(std::find(cfg.defaulted.begin(), cfg.defaulted.end(), "amr.wave_tolerance") != cfg.defaulted.end());
  const std::string out = echo(cfg);
  const auto pos = out.find("wave_tolerance");
  REQUIRE(pos != std::string::npos);
  const std::string line = out.substr(pos, out.find('\n', pos) - pos);
  CHECK(line.find("0.01") != std::string::npos);
  CHECK(line.find("(default)") != std::string::npos);
  CHECK(cfg.settings.ratios.at(0).t == 2);
}

TEST_CASE("comments and sections") {
  const io::RunConfig cfg = io::parse_config_text(
      "# top\n[physics]\n; also a comment\ncfl = 0.5  # trailing\n\n[run]\nworkers = 3\n"
      "[amr]\nallowed_regions = 0, 1, 0, 1; 2, 3, 0, 0.5\n");
  CHECK(cfg.settings.cfl == 0.5);
  CHECK(cfg.settings.workers == 3);
  REQUIRE(cfg.settings.policy.allowed_regions.size() == 2);
  CHECK(cfg.settings.policy.allowed_regions[1].x_lower == 2.0);
  CHECK(cfg.settings.policy.allowed_regions[1].y_upper == 0.5);
}

TEST_CASE("uniform equivalent") {
  const io::RunConfig u = io::uniform_equivalent(demo_config());
  CHECK(u.settings.coarse_nx == 3200);
  CHECK(u.settings.coarse_ny == 800);
  CHECK(u.settings.ratios.empty());
  CHECK_FALSE(u.amr);
}

TEST_CASE("frame round trip") {
  io::RunConfig cfg = demo_config();
  cfg.settings.coarse_nx = 50;
  cfg.settings.coarse_ny = 8;
  cfg.settings.ratios = {RefinementRatio::isotropic(2), RefinementRatio::isotropic(2)};
  Simulation sim(cfg.settings, cfg.scenario);
  sim.initialize();
  REQUIRE(sim.hierarchy().active_levels() == 3);
  const io::Frame f = io::make_frame(sim.hierarchy(), 0.125);
  for (bool text : {false, true}) {
    const std::string path = tmp_path(text ? "round.txt" : "round.frame");
    io::write_frame(f, path, text);
    const io::Frame g = io::read_frame(path);
    CHECK(g.version == io::kFrameVersion);
    CHECK(g.time == 0.125);
    CHECK(g.num_layers == 2);
    CHECK(g.domain.x_upper == 4.0);
    REQUIRE(g.levels.size() == 3);
    CHECK(g.levels[2].nx == 200);
    CHECK(g.levels[2].dx == f.levels[2].dx);
    REQUIRE(g.patches.size() == f.patches.size());
    for (std::size_t k = 0; k < f.patches.size(); ++k) {
      CHECK(g.patches[k].level == f.patches[k].level);
      CHECK(g.patches[k].box == f.patches[k].box);
      CHECK(g.patches[k].values == f.patches[k].values);
    }
  }
}

TEST_CASE("frame of a single level") {
  io::RunConfig cfg = lake_config();
  cfg.settings.coarse_nx = 20;
  cfg.settings.coarse_ny = 5;
  cfg.settings.ratios.clear();
  Simulation sim(cfg.settings, cfg.scenario);
  sim.initialize();
  const io::Frame f = io::make_frame(sim.hierarchy(), 0.0);
  CHECK(f.levels.size() == 1);
  REQUIRE(f.patches.size() == 1);
  CHECK(f.patches[0].values.size() == 20u * 5u * 7u);
}

TEST_CASE("frame readers reject other versions and junk") {
  const std::string path = tmp_path("v2.frame");
  {
    std::ofstream out(path);
    out << "mlamr-frame 2\n";
  }
  CHECK_THROWS_AS(io::read_frame(path), io::FrameError);
  {
    std::ofstream out(path);
    out << "not a frame\n";
  }
  CHECK_THROWS_AS(io::read_frame(path), io::FrameError);
  CHECK_THROWS_AS(io::read_frame(tmp_path("missing.frame")), io::FrameError);
}

TEST_CASE("initial demo frame") {
  const io::RunConfig cfg = demo_config();
  Simulation sim(cfg.settings, cfg.scenario);
  sim.initialize();
  const io::Frame f = io::make_frame(sim.hierarchy(), 0.0);
  double min_b = 1e300, max_eta = -1e300;
  for (const auto& p : f.patches)
    for (std::size_t k = 0; k < static_cast<std::size_t>(p.box.num_cells()); ++k) {
      min_b = std::min(min_b, p.values[k * 7]);
      max_eta = std::max(max_eta, f.surface(p, k, 0));
    }
  CHECK(min_b == -1.0);
  // the finest cell centres sit 1/1600 from the pulse centre
  CHECK(max_eta == doctest::Approx(cfg.scenario.wave_amplitude).epsilon(1e-4));
  CHECK(max_eta <= cfg.scenario.wave_amplitude);
  // the pulse is refined to the finest level
  bool fine_near_pulse = false;
  for (const auto& p : f.patches)
    if (p.level == 3) {
      const double x0 = p.box.lo_i * f.levels[2].dx, x1 = (p.box.hi_i + 1) * f.levels[2].dx;
      fine_near_pulse = fine_near_pulse || (x0 < 0.5 && x1 > 0.5);
    }
  CHECK(fine_near_pulse);
}

TEST_CASE("surface comparison") {
  io::RunConfig cfg = demo_config();
  cfg.settings.coarse_nx = 50;
  cfg.settings.coarse_ny = 8;
  cfg.settings.ratios = {RefinementRatio::isotropic(2)};
  Simulation sim(cfg.settings, cfg.scenario);
  sim.initialize();
  const io::Frame a = io::make_frame(sim.hierarchy(), 0.0);
  CHECK(io::compare_l1(a, a, 0) == 0.0);
  io::Frame b = a;
  for (auto& p : b.patches)
    for (std::size_t k = 0; k < static_cast<std::size_t>(p.box.num_cells()); ++k) p.values[k * 7 + 1] += 0.01;
  CHECK(io::compare_l1(a, b, 0) == doctest::Approx(0.01).epsilon(1e-9));
  CHECK(io::compare_l1(a, b, 1) == doctest::Approx(0.0).epsilon(1e-12));
  const auto eta = io::project_surface(a, 0, 100, 16);
  CHECK(eta.size() == 1600u);
}

TEST_CASE("timing report") {
  RunStats amr, uni;
  amr.total_cell_updates = 177000000;
  uni.total_cell_updates = 2460000000;
  amr.wall_time = 1680.0;
  uni.wall_time = 17580.0;
  amr.cpu_time = 1680.0;
  uni.cpu_time = 17580.0;
  const std::string table = io::format_report(amr, uni);
  CHECK(table.find("7.20%") != std::string::npos);
  CHECK(table.find("9.56%") != std::string::npos);
  const io::ReportNumbers n = io::parse_report(table);
  CHECK(n.amr_updates == 177000000.0);
  CHECK(*n.uniform_updates == 2460000000.0);
  CHECK(*n.update_ratio == doctest::Approx(7.20));
  CHECK(*n.wall_ratio == doctest::Approx(9.56));

  const io::ReportNumbers same = io::parse_report(io::format_report(amr, amr));
  CHECK(*same.update_ratio == 100.0);
  CHECK(*same.wall_ratio == 100.0);

  const std::string alone = io::format_report(amr, std::nullopt);
  CHECK(alone.find("absent") != std::string::npos);
  const io::ReportNumbers a = io::parse_report(alone);
  CHECK_FALSE(a.uniform_updates.has_value());
  CHECK_FALSE(a.update_ratio.has_value());
  CHECK(a.amr_wall == 1680.0);

  CHECK(io::percent(1.77e8, 2.46e9) == "7.20%");
}

TEST_CASE("stats round trip") {
  RunStats s;
  s.num_layers = 2;
  s.num_levels = 3;
  s.total_cell_updates = 123456789012LL;
  s.level_cell_updates = {1, 2, 3};
  s.initial_mass = {1.5, 2.25};
  s.clip_delta = {1e-17, 0.0};
  s.wall_time = 3.5;
  const std::string path = tmp_path("stats.json");
  io::write_stats(s, path);
  const RunStats r = io::read_stats(path);
  CHECK(r.total_cell_updates == s.total_cell_updates);
  CHECK(r.level_cell_updates == s.level_cell_updates);
  CHECK(r.initial_mass[1] == 2.25);
  CHECK(r.clip_delta[0] == 1e-17);
  CHECK(r.wall_time == 3.5);
}
