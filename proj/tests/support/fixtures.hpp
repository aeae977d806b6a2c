#pragma once

#include <algorithm>
#include <cmath>
#include <string>

#include "mlamr/driver.hpp"
#include "mlamr/io/config.hpp"
#include "mlamr/setup.hpp"

#ifndef MLAMR_SOURCE_DIR
#define MLAMR_SOURCE_DIR "."
#endif

namespace mlamr::testing {

inline std::string source_path(const std::string& rel) { return std::string(MLAMR_SOURCE_DIR) + "/" + rel; }

inline io::RunConfig demo_config() { return io::parse_config(source_path("configs/shelf_demo.cfg")); }

// The demo at rest: no pulse, same bed, layers and AMR settings.
inline io::RunConfig lake_config() {
  io::RunConfig cfg = demo_config();
  cfg.scenario.wave_amplitude = 0.0;
  cfg.scenario.frame_times.clear();
  return cfg;
}

// Single-layer dam at x = 1 on a flat bed over [0, 2], `nx` cells across a
// four-cell strip with walls along its sides.
inline io::RunConfig dam_break_config(int nx) {
  const double dy = 2.0 / nx;
  return io::parse_config_text(
      "[scenario]\nkind = dam_break\nx_lower = 0\nx_upper = 2\ny_lower = 0\ny_upper = " +
      std::to_string(4 * dy) +
      "\nbed_deep = 0\nbed_shelf = 0\nsea_level = 0.5\ndam_x = 1\ndam_left = 1\ndam_right = 0.5\n"
      "bc_left = outflow\nbc_right = outflow\nbc_bottom = wall\nbc_top = wall\n"
      "final_time = 0.5\nframe_times = 0.5\n"
      "[physics]\nlayers = 1\ngravity = 1\ncfl = 0.9\n"
      "[amr]\nlevels = 1\ncoarse_nx = " + std::to_string(nx) + "\ncoarse_ny = 4\n",
      "dam_break");
}

// One level over the scenario, bathymetry and initial state filled, ghosts set.
inline Hierarchy single_level(const io::RunConfig& cfg) {
  const auto& s = cfg.settings;
  Hierarchy h = build_hierarchy(s.domain, s.coarse_nx, s.coarse_ny, {}, s.params.num_layers);
  Patch& p = h.patches(1).front();
  fill_bathymetry(p, h.ladder(), cfg.scenario);
  fill_initial_state(p, h.ladder(), cfg.scenario, s.params);
  fill_patch(p, h, 1, 1.0, cfg.scenario.boundaries(), s.params);
  return h;
}

inline double max_abs_diff(const Patch& a, const Patch& b) {
  double d = 0.0;
  const auto x = a.data();
  const auto y = b.data();
  for (std::size_t k = 0; k < x.size(); ++k) d = std::max(d, std::fabs(x[k] - y[k]));
  return d;
}

}  // namespace mlamr::testing
