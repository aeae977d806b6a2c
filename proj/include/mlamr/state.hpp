#pragma once

#include <array>
#include <vector>

namespace mlamr {

/// Upper bound on layers carried per cell; the solver itself handles 1 or 2.
inline constexpr int kMaxLayers = 4;

using LayerArray = std::array<double, kMaxLayers>;

/// Stratification and wet/dry parameters. Layer 0 is the top (lightest) layer.
struct LayerParams {
  int num_layers = 2;
  std::vector<double> densities{0.95, 1.0};
  double gravity = 1.0;
  double dry_tolerance = 1e-3;

  /// rho_top / rho_bottom for two layers, 1 otherwise.
  double density_ratio() const;
  /// Throws std::invalid_argument on non-increasing densities, bad tolerance or gravity.
  void validate() const;

  static LayerParams single_layer(double gravity = 1.0, double dry_tolerance = 1e-3);
  static LayerParams two_layer(double density_ratio, double gravity = 1.0,
                               double dry_tolerance = 1e-3);
};

/// Conserved quantities of one cell plus its bathymetry.
struct CellState {
  int num_layers = 1;
  double bathy = 0.0;
  LayerArray h{};
  LayerArray hu{};
  LayerArray hv{};
};

/// Surface elevations eta_0 >= eta_1 >= ... >= bathymetry.
struct SurfaceSet {
  int num_layers = 1;
  LayerArray eta{};
};

/// eta_m = B + sum_{n >= m} h_n.
SurfaceSet surfaces_from_state(const CellState& cell);

/// The floor layer m sits on: B plus the depths of every layer below m.
double effective_bathymetry(const CellState& cell, int m);

/// Recovers depths bottom-up against the effective bathymetry, clipping at zero.
/// Momenta are left zero. `clipped`, when given, receives the per-layer depth
/// that clipping added (always >= 0).
CellState state_from_surfaces(const SurfaceSet& surfaces, double bathy, int num_layers,
                              double dry_tolerance, LayerArray* clipped = nullptr);

bool is_wet(double h, double dry_tolerance);

/// Wet layers form a contiguous run from the top.
bool has_wet_prefix(const CellState& cell, double dry_tolerance);

/// Zeroes momenta of every layer at or below the dry tolerance.
void zero_dry_momenta(CellState& cell, double dry_tolerance);

}  // namespace mlamr
