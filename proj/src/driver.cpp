#include "mlamr/driver.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <ctime>
#include <exception>
#include <thread>

#include "mlamr/coarsen.hpp"

namespace mlamr {

LayerArray RunStats::mass_drift() const {
  LayerArray d{};
  for (int m = 0; m < kMaxLayers; ++m) d[m] = final_mass[m] - initial_mass[m];
  return d;
}

LayerArray RunStats::accounted_mass() const {
  LayerArray a{};
  for (int m = 0; m < kMaxLayers; ++m)
    a[m] = initial_mass[m] + regrid_delta[m] + interface_delta[m] + boundary_delta[m] +
           clip_delta[m];
  return a;
}

Simulation::Simulation(SimulationSettings settings, const ProblemSetup& setup)
    : settings_(std::move(settings)), setup_(setup), bc_(setup.boundaries()) {
  settings_.params.validate();
  settings_.policy.validate();
  if (!(settings_.cfl > 0.0 && settings_.cfl <= 1.0))
    throw std::invalid_argument("cfl must be in (0, 1]");
  if (settings_.workers < 1) throw std::invalid_argument("workers must be >= 1");
}

void Simulation::initialize() {
  const auto& s = settings_;
  hierarchy_ = build_hierarchy(s.domain, s.coarse_nx, s.coarse_ny, s.ratios, s.params.num_layers);
  const int L = hierarchy_.max_levels();
  level_time_.assign(static_cast<std::size_t>(L + 1), 0.0);
  level_time_old_.assign(static_cast<std::size_t>(L + 1), 0.0);
  level_steps_.assign(static_cast<std::size_t>(L + 1), 0);
  stats_ = RunStats{};
  stats_.num_layers = s.params.num_layers;
  stats_.num_levels = L;
  stats_.level_cell_updates.assign(static_cast<std::size_t>(L), 0);

  Patch& base = hierarchy_.patches(1).front();
  fill_bathymetry(base, hierarchy_.ladder(), setup_);
  fill_initial_state(base, hierarchy_.ladder(), setup_, s.params);
  fill_level(1, 0.0);
  if (L > 1) regrid(1, NewCellSource::initial_condition);
  fill_all_ghosts();
  stats_.initial_mass = composite_volume(hierarchy_);
  stats_.regrid_delta = LayerArray{};
  stats_.regrids = 0;
}

void Simulation::fill_level(int l, double t) {
  double alpha = 1.0;
  if (l > 1) {
    const double t0 = level_time_old_[static_cast<std::size_t>(l - 1)];
    const double t1 = level_time_[static_cast<std::size_t>(l - 1)];
    alpha = (t1 > t0) ? (t - t0) / (t1 - t0) : 1.0;
  }
  for (Patch& p : hierarchy_.patches(l)) fill_patch(p, hierarchy_, l, alpha, bc_, settings_.params);
}

void Simulation::fill_all_ghosts() {
  for (int l = 1; l <= hierarchy_.active_levels(); ++l)
    fill_level(l, level_time_[static_cast<std::size_t>(l)]);
}

void Simulation::step_level_patches(int l, double dt) {
  auto& ps = hierarchy_.patches(l);
  const LevelSpec& spec = hierarchy_.ladder().level(l);
  const bool x_first = level_steps_[static_cast<std::size_t>(l)] % 2 == 0;
  std::vector<StepResult> results(ps.size());
  std::vector<std::exception_ptr> errors(ps.size());
  auto work = [&](std::size_t k) {
    try {
      results[k] = step_patch(ps[k], dt, settings_.params, spec.dx, spec.dy, x_first);
    } catch (...) {
      errors[k] = std::current_exception();
    }
  };
  const std::size_t nworkers =
      std::min<std::size_t>(static_cast<std::size_t>(settings_.workers), ps.size());
  if (nworkers <= 1) {
    for (std::size_t k = 0; k < ps.size(); ++k) work(k);
  } else {
    std::vector<std::thread> pool;
    for (std::size_t w = 0; w < nworkers; ++w)
      pool.emplace_back([&, w] {
        for (std::size_t k = w; k < ps.size(); k += nworkers) work(k);
      });
    for (auto& t : pool) t.join();
  }
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);

  StepResult merged;
  for (const auto& r : results) merged.merge(r);
  stats_.total_cell_updates += merged.cells_updated;
  stats_.level_cell_updates[static_cast<std::size_t>(l - 1)] += merged.cells_updated;
  stats_.hyperbolicity_warnings += merged.hyperbolicity_warnings;
  stats_.prefix_violations += merged.prefix_violations;
  // clipping under a finer level is overwritten by the projection
  for (const ClipEvent& e : merged.clips)
    if (!hierarchy_.covered_by_finer(l, e.i, e.j)) stats_.clip_delta[e.layer] += e.volume;
}

void Simulation::accumulate_sides(int l) {
  for (Patch& p : hierarchy_.patches(l)) {
    const IndexBox b = p.box();
    const std::size_t nx = static_cast<std::size_t>(b.nx());
    const std::size_t ny = static_cast<std::size_t>(b.ny());
    for (int m = 0; m < p.num_layers(); ++m) {
      const std::size_t mm = static_cast<std::size_t>(m);
      const double* fx = p.flux.x.data() + mm * (nx + 1) * ny;
      const double* fy = p.flux.y.data() + mm * nx * (ny + 1);
      for (std::size_t j = 0; j < ny; ++j) {
        p.sides.left[mm * ny + j] += fx[j * (nx + 1)];
        p.sides.right[mm * ny + j] += fx[j * (nx + 1) + nx];
      }
      for (std::size_t i = 0; i < nx; ++i) {
        p.sides.bottom[mm * nx + i] += fy[i];
        p.sides.top[mm * nx + i] += fy[ny * nx + i];
      }
    }
  }
}

namespace {

double face_x(const Patch& p, int m, int face_i, int j) {
  const IndexBox b = p.box();
  const std::size_t nx = static_cast<std::size_t>(b.nx());
  return p.flux.x[static_cast<std::size_t>(m) * (nx + 1) * static_cast<std::size_t>(b.ny()) +
                  static_cast<std::size_t>(j - b.lo_j) * (nx + 1) +
                  static_cast<std::size_t>(face_i - b.lo_i)];
}

double face_y(const Patch& p, int m, int i, int face_j) {
  const IndexBox b = p.box();
  const std::size_t nx = static_cast<std::size_t>(b.nx());
  return p.flux.y[static_cast<std::size_t>(m) * nx * static_cast<std::size_t>(b.ny() + 1) +
                  static_cast<std::size_t>(face_j - b.lo_j) * nx +
                  static_cast<std::size_t>(i - b.lo_i)];
}

}  // namespace

LayerArray Simulation::domain_inflow(int l) const {
  LayerArray in{};
  const IndexBox dom = hierarchy_.ladder().domain_box(l);
  for (const Patch& p : hierarchy_.patches(l)) {
    const IndexBox b = p.box();
    const int M = p.num_layers();
    for (int j = b.lo_j; j <= b.hi_j; ++j) {
      if (b.lo_i == dom.lo_i && !hierarchy_.covered_by_finer(l, b.lo_i, j))
        for (int m = 0; m < M; ++m) in[m] += face_x(p, m, b.lo_i, j);
      if (b.hi_i == dom.hi_i && !hierarchy_.covered_by_finer(l, b.hi_i, j))
        for (int m = 0; m < M; ++m) in[m] -= face_x(p, m, b.hi_i + 1, j);
    }
    for (int i = b.lo_i; i <= b.hi_i; ++i) {
      if (b.lo_j == dom.lo_j && !hierarchy_.covered_by_finer(l, i, b.lo_j))
        for (int m = 0; m < M; ++m) in[m] += face_y(p, m, i, b.lo_j);
      if (b.hi_j == dom.hi_j && !hierarchy_.covered_by_finer(l, i, b.hi_j))
        for (int m = 0; m < M; ++m) in[m] -= face_y(p, m, i, b.hi_j + 1);
    }
  }
  return in;
}

LayerArray Simulation::interface_mismatch(int l) const {
  LayerArray delta{};
  const LevelSpec& cs = hierarchy_.ladder().level(l);
  const IndexBox dom = hierarchy_.ladder().domain_box(l);
  const int rx = cs.r_x;
  const int ry = cs.r_y;
  const auto& coarse = hierarchy_.patches(l);
  auto owner = [&](int i, int j) -> const Patch& {
    const int k = hierarchy_.find_patch(l, i, j);
    if (k < 0) throw GeometryError("interface face without coarse owner");
    return coarse[static_cast<std::size_t>(k)];
  };
  for (const Patch& f : hierarchy_.patches(l + 1)) {
    const IndexBox fb = f.box();
    const IndexBox cb = fb.coarsened(rx, ry);
    const int M = f.num_layers();
    const std::size_t fnx = static_cast<std::size_t>(fb.nx());
    const std::size_t fny = static_cast<std::size_t>(fb.ny());
    for (int cj = cb.lo_j; cj <= cb.hi_j; ++cj) {
      const int j0 = cj * ry - fb.lo_j;
      if (cb.lo_i > dom.lo_i && !hierarchy_.covered_by_finer(l, cb.lo_i - 1, cj)) {
        const Patch& q = owner(cb.lo_i, cj);
        for (int m = 0; m < M; ++m) {
          double fine = 0.0;
          for (int k = 0; k < ry; ++k) fine += f.sides.left[static_cast<std::size_t>(m) * fny + j0 + k];
          delta[m] += fine - face_x(q, m, cb.lo_i, cj);
        }
      }
      if (cb.hi_i < dom.hi_i && !hierarchy_.covered_by_finer(l, cb.hi_i + 1, cj)) {
        const Patch& q = owner(cb.hi_i, cj);
        for (int m = 0; m < M; ++m) {
          double fine = 0.0;
          for (int k = 0; k < ry; ++k) fine += f.sides.right[static_cast<std::size_t>(m) * fny + j0 + k];
          delta[m] += -fine + face_x(q, m, cb.hi_i + 1, cj);
        }
      }
    }
    for (int ci = cb.lo_i; ci <= cb.hi_i; ++ci) {
      const int i0 = ci * rx - fb.lo_i;
      if (cb.lo_j > dom.lo_j && !hierarchy_.covered_by_finer(l, ci, cb.lo_j - 1)) {
        const Patch& q = owner(ci, cb.lo_j);
        for (int m = 0; m < M; ++m) {
          double fine = 0.0;
          for (int k = 0; k < rx; ++k) fine += f.sides.bottom[static_cast<std::size_t>(m) * fnx + i0 + k];
          delta[m] += fine - face_y(q, m, ci, cb.lo_j);
        }
      }
      if (cb.hi_j < dom.hi_j && !hierarchy_.covered_by_finer(l, ci, cb.hi_j + 1)) {
        const Patch& q = owner(ci, cb.hi_j);
        for (int m = 0; m < M; ++m) {
          double fine = 0.0;
          for (int k = 0; k < rx; ++k) fine += f.sides.top[static_cast<std::size_t>(m) * fnx + i0 + k];
          delta[m] += -fine + face_y(q, m, ci, cb.hi_j + 1);
        }
      }
    }
  }
  return delta;
}

void Simulation::regrid(int l, NewCellSource source) {
  const RegridReport rep =
      regrid_level(hierarchy_, l, settings_.policy, setup_, settings_.params, source);
  for (int m = 0; m < kMaxLayers; ++m) stats_.regrid_delta[m] += rep.mass_delta[m];
  ++stats_.regrids;
  for (int k = l + 1; k <= hierarchy_.max_levels(); ++k) {
    level_time_[static_cast<std::size_t>(k)] = level_time_[static_cast<std::size_t>(l)];
    level_time_old_[static_cast<std::size_t>(k)] = level_time_[static_cast<std::size_t>(l)];
  }
}

void Simulation::advance_level(int l, double dt, double t_end) {
  const std::size_t li = static_cast<std::size_t>(l);
  const double t0 = level_time_[li];
  fill_level(l, t0);
  const bool has_finer = l < hierarchy_.active_levels();
  if (has_finer)
    for (Patch& p : hierarchy_.patches(l)) p.save_old();

  step_level_patches(l, dt);
  level_time_old_[li] = t0;
  level_time_[li] = t_end;
  for (Patch& p : hierarchy_.patches(l)) p.time = t_end;
  const LayerArray inflow = domain_inflow(l);
  for (int m = 0; m < kMaxLayers; ++m) stats_.boundary_delta[m] += inflow[m];
  if (l > 1) accumulate_sides(l);

  if (has_finer) {
    const LevelSpec& spec = hierarchy_.ladder().level(l);
    for (Patch& q : hierarchy_.patches(l + 1)) q.sides.reset(q.num_layers(), q.box().nx(), q.box().ny());
    fill_level(l, t_end);
    const double dtf = dt / spec.r_t;
    for (int k = 1; k <= spec.r_t; ++k)
      advance_level(l + 1, dtf, k == spec.r_t ? t_end : t0 + k * dtf);
    const LayerArray mismatch = interface_mismatch(l);
    for (int m = 0; m < kMaxLayers; ++m) stats_.interface_delta[m] += mismatch[m];
    average_down(hierarchy_.patches(l + 1), hierarchy_.patches(l), spec.ratio(), spec.dx, spec.dy,
                 settings_.params.dry_tolerance);
  }
  ++level_steps_[li];
  if (l < hierarchy_.max_levels() && level_steps_[li] % settings_.policy.regrid_interval == 0) {
    fill_level(l, t_end);
    regrid(l, NewCellSource::interpolate);
  }
}

double Simulation::step(double dt_limit) {
  // every active level must satisfy the bound at its own subcycled step
  double dt = settings_.dt_max;
  double scale = 1.0;
  for (int l = 1; l <= hierarchy_.active_levels(); ++l) {
    const LevelSpec& s = hierarchy_.ladder().level(l);
    for (const Patch& p : hierarchy_.patches(l))
      dt = std::min(dt, scale * stable_dt(p, settings_.params, s.dx, s.dy, settings_.cfl,
                                          settings_.dt_max));
    scale *= s.r_t;
  }
  const double t = time();
  if (dt >= dt_limit) {
    // land exactly on t + dt_limit
    advance_level(1, dt_limit, t + dt_limit);
    dt = dt_limit;
  } else {
    advance_level(1, dt, t + dt);
  }
  ++stats_.coarse_steps;
  return dt;
}

RunStats Simulation::run(const FrameCallback& on_frame) {
  if (level_time_.empty()) initialize();
  std::vector<double> frames = settings_.frame_times;
  std::sort(frames.begin(), frames.end());
  const double eps = 1e-12 * std::max(1.0, settings_.final_time);
  std::size_t next = 0;
  double io_wall = 0.0;
  double io_cpu = 0.0;
  auto emit = [&] {
    const auto w = std::chrono::steady_clock::now();
    const std::clock_t c = std::clock();
    if (on_frame) on_frame(hierarchy_, time());
    io_wall += std::chrono::duration<double>(std::chrono::steady_clock::now() - w).count();
    io_cpu += static_cast<double>(std::clock() - c) / CLOCKS_PER_SEC;
    ++next;
  };
  const auto wall0 = std::chrono::steady_clock::now();
  const std::clock_t cpu0 = std::clock();
  while (next < frames.size() && frames[next] <= time() + eps) emit();
  while (time() < settings_.final_time - eps) {
    double target = settings_.final_time;
    if (next < frames.size()) target = std::min(target, frames[next]);
    step(target - time());
    while (next < frames.size() && frames[next] <= time() + eps) emit();
  }
  stats_.wall_time +=
      std::chrono::duration<double>(std::chrono::steady_clock::now() - wall0).count() - io_wall;
  stats_.cpu_time += static_cast<double>(std::clock() - cpu0) / CLOCKS_PER_SEC - io_cpu;
  stats_.final_time = time();
  stats_.final_mass = composite_volume(hierarchy_);
  return stats_;
}

}  // namespace mlamr
