#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "mlamr/mesh.hpp"

namespace mlamr::io {

inline constexpr int kFrameVersion = 1;

class FrameError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct FrameLevel {
  int nx = 0, ny = 0;
  double dx = 0.0, dy = 0.0;
};

/// One patch interior. `values` is row-major over cells; each cell holds
/// B, then h, hu, hv for every layer (top layer first).
struct FramePatch {
  int level = 1;
  IndexBox box;
  std::vector<double> values;

  int values_per_cell(int num_layers) const { return 1 + 3 * num_layers; }
};

struct Frame {
  int version = kFrameVersion;
  double time = 0.0;
  int num_layers = 1;
  Extent domain{};
  std::vector<FrameLevel> levels;
  std::vector<FramePatch> patches;

  /// Surface eta_m of cell k of patch p.
  double surface(const FramePatch& p, std::size_t cell, int m) const;
};

Frame make_frame(const Hierarchy& hierarchy, double time);

/// Binary payload after a plain-text header, or CSV rows when `text` is set.
void write_frame(const Frame& frame, const std::string& path, bool text = false);
void write_frame(const Hierarchy& hierarchy, double time, const std::string& path, bool text = false);
Frame read_frame(const std::string& path);

/// eta_m sampled on the finest grid of `frame` at refinement `fine_nx` x `fine_ny`;
/// every fine cell takes the value of the finest patch covering it.
std::vector<double> project_surface(const Frame& frame, int m, int fine_nx, int fine_ny);

/// Mean absolute difference of eta_m over the finer of the two finest grids.
double compare_l1(const Frame& a, const Frame& b, int m = 0);

}  // namespace mlamr::io
