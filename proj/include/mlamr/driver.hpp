#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "mlamr/mesh.hpp"
#include "mlamr/physics.hpp"
#include "mlamr/regrid.hpp"
#include "mlamr/setup.hpp"

namespace mlamr {

struct SimulationSettings {
  Extent domain{0.0, 4.0, 0.0, 1.0};
  int coarse_nx = 200;
  int coarse_ny = 50;
  std::vector<RefinementRatio> ratios{RefinementRatio::isotropic(4), RefinementRatio::isotropic(4)};
  LayerParams params{};
  RegridPolicy policy{};
  double cfl = 0.9;
  double dt_max = 1.0;
  double final_time = 1.0;
  std::vector<double> frame_times{};
  int workers = 1;
};

/// Counters and timers of one run. Mass terms are volumes per layer; the
/// accounting identity is final = initial + regrid + interface + boundary + clip.
struct RunStats {
  int num_layers = 0;
  int num_levels = 0;
  double wall_time = 0.0;
  double cpu_time = 0.0;
  std::int64_t total_cell_updates = 0;
  std::vector<std::int64_t> level_cell_updates;
  std::int64_t coarse_steps = 0;
  std::int64_t regrids = 0;
  std::int64_t hyperbolicity_warnings = 0;
  std::int64_t prefix_violations = 0;
  double final_time = 0.0;
  LayerArray initial_mass{};
  LayerArray final_mass{};
  LayerArray regrid_delta{};     // refinement/regrid changes of composite volume
  LayerArray interface_delta{};  // coarse/fine flux mismatch (no refluxing)
  LayerArray boundary_delta{};   // net inflow through the physical boundary
  LayerArray clip_delta{};       // depth clipped back to zero

  LayerArray mass_drift() const;
  LayerArray accounted_mass() const;
};

/// Subcycled multi-level integrator over one problem setup.
class Simulation {
 public:
  using FrameCallback = std::function<void(const Hierarchy&, double time)>;

  Simulation(SimulationSettings settings, const ProblemSetup& setup);

  /// Builds level 1 from the initial condition and the initial refinement.
  void initialize();

  /// One level-1 step of at most `dt_limit`; returns the step taken.
  double step(double dt_limit);

  /// Steps level l by dt (and, recursively, every finer level r_t times),
  /// ending at t_end. Public for tests that drive levels directly.
  void advance_level(int l, double dt, double t_end);

  /// Runs to the final time, calling `on_frame` at each frame time.
  RunStats run(const FrameCallback& on_frame = {});

  double time() const { return level_time_.at(1); }
  double level_time(int l) const { return level_time_.at(static_cast<std::size_t>(l)); }
  const Hierarchy& hierarchy() const { return hierarchy_; }
  Hierarchy& hierarchy() { return hierarchy_; }
  const RunStats& stats() const { return stats_; }
  const SimulationSettings& settings() const { return settings_; }

  /// Refills every active level's ghost frame at its current time.
  void fill_all_ghosts();

 private:
  void fill_level(int l, double t);
  void step_level_patches(int l, double dt);
  LayerArray domain_inflow(int l) const;
  LayerArray interface_mismatch(int l) const;
  void accumulate_sides(int l);
  void regrid(int l, NewCellSource source);

  SimulationSettings settings_;
  const ProblemSetup& setup_;
  BoundarySet bc_;
  Hierarchy hierarchy_;
  RunStats stats_;
  std::vector<double> level_time_;
  std::vector<double> level_time_old_;
  std::vector<std::int64_t> level_steps_;
};

}  // namespace mlamr
