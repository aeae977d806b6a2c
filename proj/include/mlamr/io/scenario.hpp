#pragma once

#include <string>
#include <vector>

#include "mlamr/mesh.hpp"
#include "mlamr/setup.hpp"

namespace mlamr::io {

enum class InitialKind { pulse, dam_break };

/// Analytic problem description: a bed that steps from `bed_deep` to
/// `bed_shelf` at x = shelf_x, rest surfaces at sea_level / interface_level,
/// and either a Gaussian pulse on the top surface or a dam across x = dam_x.
struct Scenario final : ProblemSetup {
  std::string name = "shelf_demo";
  Extent domain{0.0, 4.0, 0.0, 1.0};
  double bed_deep = -1.0;
  double bed_shelf = -0.45;
  double shelf_x = 2.5;
  double sea_level = 0.0;
  double interface_level = -0.6;

  InitialKind kind = InitialKind::pulse;
  double wave_amplitude = 0.02;
  double wave_center = 0.5;
  double wave_width = 0.1;
  bool wave_moving = true;  // carry the long-wave momentum toward +x

  double dam_x = 1.0;
  double dam_left = 1.0;   // surface height left of the dam
  double dam_right = 0.5;  // and right of it

  BoundarySet bc{BoundaryKind::outflow, BoundaryKind::outflow, BoundaryKind::wall,
                 BoundaryKind::wall};
  double final_time = 3.0;
  std::vector<double> frame_times{0.0, 1.5, 3.0};

  double bathymetry_average(double x0, double x1, double y0, double y1) const override;
  CellState initial_state(double x, double y, double bathy,
                          const LayerParams& params) const override;
  SurfaceSet rest_surfaces(double bathy, const LayerParams& params) const override;
  BoundarySet boundaries() const override { return bc; }

  /// Throws std::invalid_argument when no cell holds every layer at rest or
  /// frame times are unsorted.
  void validate(const LayerParams& params) const;
};

/// The shipped two-layer shelf configuration.
Scenario shelf_demo();

const char* to_string(BoundaryKind k);
const char* to_string(InitialKind k);

}  // namespace mlamr::io
