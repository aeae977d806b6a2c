#include "mlamr/physics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <vector>

namespace mlamr {

void StepResult::merge(const StepResult& o) {
  max_wave_speed = std::max(max_wave_speed, o.max_wave_speed);
  max_courant = std::max(max_courant, o.max_courant);
  cells_updated += o.cells_updated;
  for (int m = 0; m < kMaxLayers; ++m) {
    mass_delta[m] += o.mass_delta[m];
    clip_mass[m] += o.clip_mass[m];
  }
  clips.insert(clips.end(), o.clips.begin(), o.clips.end());
  hyperbolicity_warnings += o.hyperbolicity_warnings;
  prefix_violations += o.prefix_violations;
}

double external_wave_speed(double total_depth, double gravity) {
  return std::sqrt(gravity * std::max(total_depth, 0.0));
}

double internal_wave_speed(double h_top, double h_bottom, double gravity, double density_ratio) {
  const double total = h_top + h_bottom;
  if (total <= 0.0) return 0.0;
  return std::sqrt(gravity * (1.0 - density_ratio) * h_top * h_bottom / total);
}

namespace {

struct Consts {
  double g = 1.0;
  double tol = 1e-3;
  // ratio[m][n] = rho_n / rho_m: weight of layer n's depth in layer m's pressure floor
  double ratio[kMaxLayers][kMaxLayers]{};
};

Consts make_consts(const LayerParams& p) {
  Consts c;
  c.g = p.gravity;
  c.tol = p.dry_tolerance;
  for (int m = 0; m < p.num_layers; ++m)
    for (int n = 0; n < p.num_layers; ++n) c.ratio[m][n] = p.densities[n] / p.densities[m];
  return c;
}

template <int M>
struct Side {
  double bathy;
  double total;
  double h[M];
  double qn[M];
  double qt[M];
  double u[M];
  double v[M];
  double d[M];  // depth part of the pressure floor
  bool wet[M];
};

template <int M>
struct Flux {
  double mass[M];
  double mom_left[M];
  double mom_right[M];
  double tang[M];
  double speed;
};

// Velocities and floor depths (lower layers plus density-weighted upper layers).
template <int M>
inline void prepare(Side<M>& s, const Consts& c) {
  s.total = 0.0;
  for (int m = 0; m < M; ++m) {
    s.total += s.h[m];
    s.wet[m] = s.h[m] > c.tol;
    const double inv = s.wet[m] ? 1.0 / s.h[m] : 0.0;
    s.u[m] = s.qn[m] * inv;
    s.v[m] = s.qt[m] * inv;
    double v = 0.0;
    for (int n = 0; n < M; ++n) {
      if (n > m) v += s.h[n];
      else if (n < m) v += c.ratio[m][n] * s.h[n];
    }
    s.d[m] = v;
  }
}

template <int M>
[[gnu::always_inline]] inline void face_flux(const Side<M>& L, const Side<M>& R, const Consts& c,
                                             Flux<M>& out) {
  const double bed = std::max(L.bathy, R.bathy);
  double hsl[M], hsr[M];
  double umin = std::numeric_limits<double>::infinity();
  double umax = -umin;
  for (int m = 0; m < M; ++m) {
    // the bed enters through its maximum, the other layers through their mean
    const double zs = bed + 0.5 * (L.d[m] + R.d[m]);
    hsl[m] = std::max(0.0, L.h[m] + L.bathy + L.d[m] - zs);
    hsr[m] = std::max(0.0, R.h[m] + R.bathy + R.d[m] - zs);
    if (L.wet[m]) {
      umin = std::min(umin, L.u[m]);
      umax = std::max(umax, L.u[m]);
    }
    if (R.wet[m]) {
      umin = std::min(umin, R.u[m]);
      umax = std::max(umax, R.u[m]);
    }
  }
  if (umin > umax) umin = umax = 0.0;
  // Mass diffusion: where every layer below m is unclipped on both sides the
  // jump is taken in h_m plus the bed for the bottom layer (zero at rest, and
  // the same coefficient for every layer); elsewhere in the reconstructed depth.
  double jump[M];
  bool connected = true;
  for (int m = M - 1; m >= 0; --m) {
    const bool open = hsl[m] > 0.0 && hsr[m] > 0.0;
    if (connected && open && M > 1)
      jump[m] = (R.h[m] - L.h[m]) + (m == M - 1 ? R.bathy - L.bathy : 0.0);
    else
      jump[m] = hsr[m] - hsl[m];
    connected = connected && open;
  }
  const double cs = std::sqrt(c.g * std::max(L.total, R.total));
  const double sl = umin - cs;
  const double sr = umax + cs;
  out.speed = std::max(-sl, sr);
  const double half_g = 0.5 * c.g;

  if (!(sr > sl)) {
    for (int m = 0; m < M; ++m) {
      out.mass[m] = 0.0;
      out.tang[m] = 0.0;
      out.mom_left[m] = half_g * (L.h[m] * L.h[m] - hsl[m] * hsl[m]);
      out.mom_right[m] = half_g * (R.h[m] * R.h[m] - hsr[m] * hsr[m]);
    }
    return;
  }
  const double inv = 1.0 / (sr - sl);
  for (int m = 0; m < M; ++m) {
    const double ul = L.u[m], vl = L.v[m], ur = R.u[m], vr = R.v[m];
    const double fl0 = hsl[m] * ul;
    const double fl1 = fl0 * ul + half_g * hsl[m] * hsl[m];
    const double fl2 = fl0 * vl;
    const double fr0 = hsr[m] * ur;
    const double fr1 = fr0 * ur + half_g * hsr[m] * hsr[m];
    const double fr2 = fr0 * vr;
    double f0, f1, f2;
    if (sl >= 0.0) {
      f0 = fl0;
      f1 = fl1;
      f2 = fl2;
    } else if (sr <= 0.0) {
      f0 = fr0;
      f1 = fr1;
      f2 = fr2;
    } else {
      f0 = (sr * fl0 - sl * fr0 + sl * sr * jump[m]) * inv;
      f1 = (sr * fl1 - sl * fr1 + sl * sr * (fr0 - fl0)) * inv;
      f2 = (sr * fl2 - sl * fr2 + sl * sr * (hsr[m] * vr - hsl[m] * vl)) * inv;
    }
    out.mass[m] = f0;
    out.tang[m] = f2;

    out.mom_left[m] = f1 + half_g * (L.h[m] * L.h[m] - hsl[m] * hsl[m]);
    out.mom_right[m] = f1 + half_g * (R.h[m] * R.h[m] - hsr[m] * hsr[m]);
  }
}

template <int M>
struct Fields {
  double* bathy;
  double* h[M];
  double* qu[M];
  double* qv[M];

  explicit Fields(Patch& p) : bathy(p.component(0)) {
    for (int m = 0; m < M; ++m) {
      h[m] = p.component(1 + 3 * m);
      qu[m] = p.component(2 + 3 * m);
      qv[m] = p.component(3 + 3 * m);
    }
  }

  // normal/tangential momenta chosen by sweep direction
  void load(std::size_t k, bool x_dir, const Consts& c, Side<M>& s) const {
    s.bathy = bathy[k];
    for (int m = 0; m < M; ++m) {
      s.h[m] = h[m][k];
      s.qn[m] = x_dir ? qu[m][k] : qv[m][k];
      s.qt[m] = x_dir ? qv[m][k] : qu[m][k];
    }
    prepare(s, c);
  }
};

template <int M>
inline void post_update(Fields<M>& f, std::size_t k, int i, int j, double tol, bool count,
                        double cell_area, StepResult& res) {
  for (int m = 0; m < M; ++m) {
    double& h = f.h[m][k];
    if (h < 0.0) {
      if (count) {
        res.clip_mass[m] += -h * cell_area;
        res.clips.push_back({i, j, m, -h * cell_area});
      }
      h = 0.0;
    }
    if (!(h > tol)) {
      f.qu[m][k] = 0.0;
      f.qv[m][k] = 0.0;
    }
  }
}

template <int M>
void sweep_x(Patch& p, double dt, double dx, double dy, const Consts& c, int extra,
             StepResult& res) {
  const IndexBox b = p.box();
  const int nx = b.nx();
  const int ny = b.ny();
  const int faces = nx + 1;
  Fields<M> f(p);
  std::vector<Flux<M>> buf(static_cast<std::size_t>(faces));
  std::vector<Side<M>> cells(static_cast<std::size_t>(faces + 1));
  const double lam = dt / dx;
  double smax = 0.0;
  const std::size_t xstride = static_cast<std::size_t>(faces) * static_cast<std::size_t>(ny);
  for (int j = b.lo_j - extra; j <= b.hi_j + extra; ++j) {
    const std::size_t base = p.index(b.lo_i - 1, j);
    for (int q = 0; q <= faces; ++q) f.load(base + static_cast<std::size_t>(q), true, c, cells[q]);
    for (int q = 0; q < faces; ++q) {
      face_flux<M>(cells[q], cells[q + 1], c, buf[q]);
      smax = std::max(smax, buf[q].speed);
    }
    const bool interior = j >= b.lo_j && j <= b.hi_j;
    for (int q = 0; q < nx; ++q) {
      const std::size_t k = base + 1 + static_cast<std::size_t>(q);
      const Flux<M>& lo = buf[q];
      const Flux<M>& hi = buf[q + 1];
      for (int m = 0; m < M; ++m) {
        f.h[m][k] -= lam * (hi.mass[m] - lo.mass[m]);
        f.qu[m][k] -= lam * (hi.mom_left[m] - lo.mom_right[m]);
        f.qv[m][k] -= lam * (hi.tang[m] - lo.tang[m]);
      }
      post_update(f, k, b.lo_i + q, j, c.tol, interior, dx * dy, res);
    }
    if (interior) {
      const std::size_t row = static_cast<std::size_t>(j - b.lo_j) * static_cast<std::size_t>(faces);
      for (int m = 0; m < M; ++m)
        for (int q = 0; q < faces; ++q)
          p.flux.x[static_cast<std::size_t>(m) * xstride + row + static_cast<std::size_t>(q)] =
              buf[q].mass[m] * dt * dy;
    }
  }
  res.max_wave_speed = std::max(res.max_wave_speed, smax);
  res.max_courant = std::max(res.max_courant, smax * lam);
}

template <int M>
void sweep_y(Patch& p, double dt, double dx, double dy, const Consts& c, int extra,
             StepResult& res) {
  const IndexBox b = p.box();
  const int nx = b.nx();
  const int ny = b.ny();
  const int i0 = b.lo_i - extra;
  const int width = nx + 2 * extra;
  Fields<M> f(p);
  std::vector<Flux<M>> prev(static_cast<std::size_t>(width));
  std::vector<Flux<M>> cur(static_cast<std::size_t>(width));
  std::vector<Side<M>> lower(static_cast<std::size_t>(width));
  std::vector<Side<M>> upper(static_cast<std::size_t>(width));
  const double lam = dt / dy;
  double smax = 0.0;
  const std::size_t ystride = static_cast<std::size_t>(nx) * static_cast<std::size_t>(ny + 1);
  const std::size_t row_step = static_cast<std::size_t>(p.stride());
  for (int jf = b.lo_j; jf <= b.hi_j + 1; ++jf) {
    const std::size_t below = p.index(i0, jf - 1);
    // the lower row was loaded as the previous upper row, before its update
    if (jf == b.lo_j)
      for (int q = 0; q < width; ++q) f.load(below + static_cast<std::size_t>(q), false, c, lower[q]);
    for (int q = 0; q < width; ++q)
      f.load(below + row_step + static_cast<std::size_t>(q), false, c, upper[q]);
    for (int q = 0; q < width; ++q) {
      face_flux<M>(lower[q], upper[q], c, cur[q]);
      smax = std::max(smax, cur[q].speed);
    }
    const std::size_t frow = static_cast<std::size_t>(jf - b.lo_j) * static_cast<std::size_t>(nx);
    for (int m = 0; m < M; ++m)
      for (int q = 0; q < nx; ++q)
        p.flux.y[static_cast<std::size_t>(m) * ystride + frow + static_cast<std::size_t>(q)] =
            cur[q + extra].mass[m] * dt * dx;
    if (jf > b.lo_j) {
      for (int q = 0; q < width; ++q) {
        const std::size_t k = below + static_cast<std::size_t>(q);
        const Flux<M>& lo = prev[q];
        const Flux<M>& hi = cur[q];
        for (int m = 0; m < M; ++m) {
          f.h[m][k] -= lam * (hi.mass[m] - lo.mass[m]);
          f.qv[m][k] -= lam * (hi.mom_left[m] - lo.mom_right[m]);
          f.qu[m][k] -= lam * (hi.tang[m] - lo.tang[m]);
        }
        const int i = i0 + q;
        post_update(f, k, i, jf - 1, c.tol, i >= b.lo_i && i <= b.hi_i, dx * dy, res);
      }
    }
    std::swap(prev, cur);
    std::swap(lower, upper);
  }
  res.max_wave_speed = std::max(res.max_wave_speed, smax);
  res.max_courant = std::max(res.max_courant, smax * lam);
}

template <int M>
void finish_cells(Patch& p, const LayerParams& params, StepResult& res) {
  const IndexBox b = p.box();
  Fields<M> f(p);
  const double tol = params.dry_tolerance;
  const double r = params.density_ratio();
  const double g = params.gravity;
  for (int j = b.lo_j; j <= b.hi_j; ++j) {
    for (int i = b.lo_i; i <= b.hi_i; ++i) {
      const std::size_t k = p.index(i, j);
      for (int m = 0; m < M; ++m) {
        if (!std::isfinite(f.h[m][k]) || !std::isfinite(f.qu[m][k]) || !std::isfinite(f.qv[m][k])) {
          std::ostringstream os;
          os << "non-finite state at level " << p.level() << " cell (" << i << "," << j
             << ") layer " << m;
          throw NumericalError(os.str());
        }
      }
      if constexpr (M == 2) {
        const double h0 = f.h[0][k];
        const double h1 = f.h[1][k];
        if (h0 > tol && h1 > tol) {
          const double bound = g * (1.0 - r) * (h0 + h1);
          bool blended = false;
          for (double** q : {f.qu, f.qv}) {
            const double u0 = q[0][k] / h0;
            const double u1 = q[1][k] / h1;
            const double shear = u0 - u1;
            if (shear * shear > bound) {
              const double mean = (q[0][k] + q[1][k]) / (h0 + h1);
              const double a = std::sqrt(bound) / std::fabs(shear) * (1.0 - 1e-12);
              q[0][k] = h0 * (mean + a * (u0 - mean));
              q[1][k] = h1 * (mean + a * (u1 - mean));
              blended = true;
            }
          }
          if (blended) ++res.hyperbolicity_warnings;
        }
        if (!(h0 > tol) && h1 > tol) ++res.prefix_violations;
      }
    }
  }
}

template <int M>
StepResult step_impl(Patch& p, double dt, const LayerParams& params, double dx, double dy,
                     bool x_first) {
  StepResult res;
  const Consts c = make_consts(params);
  const IndexBox b = p.box();
  p.flux.x.assign(static_cast<std::size_t>(M) * static_cast<std::size_t>(b.nx() + 1) *
                      static_cast<std::size_t>(b.ny()),
                  0.0);
  p.flux.y.assign(static_cast<std::size_t>(M) * static_cast<std::size_t>(b.nx()) *
                      static_cast<std::size_t>(b.ny() + 1),
                  0.0);
  LayerArray before{};
  for (int m = 0; m < M; ++m) before[m] = layer_volume(p, m, dx, dy);
  if (x_first) {
    sweep_x<M>(p, dt, dx, dy, c, 1, res);
    sweep_y<M>(p, dt, dx, dy, c, 0, res);
  } else {
    sweep_y<M>(p, dt, dx, dy, c, 1, res);
    sweep_x<M>(p, dt, dx, dy, c, 0, res);
  }
  finish_cells<M>(p, params, res);
  for (int m = 0; m < M; ++m) res.mass_delta[m] = layer_volume(p, m, dx, dy) - before[m];
  res.cells_updated = b.num_cells();
  if (res.max_courant > 1.0) {
    std::ostringstream os;
    os << "CFL violation on level " << p.level() << " patch " << to_string(b)
       << ": courant number " << res.max_courant;
    throw CflViolation(os.str());
  }
  return res;
}

}  // namespace

StepResult step_patch(Patch& patch, double dt, const LayerParams& params, double dx, double dy,
                      bool x_first) {
  if (!(dt > 0.0)) throw NumericalError("time step must be positive");
  switch (patch.num_layers()) {
    case 1:
      return step_impl<1>(patch, dt, params, dx, dy, x_first);
    case 2:
      return step_impl<2>(patch, dt, params, dx, dy, x_first);
    default:
      throw std::invalid_argument("solver supports one or two layers");
  }
}

double stable_dt(const Patch& patch, const LayerParams& params, double dx, double dy,
                 double cfl_target, double dt_max) {
  // separate maxima of |u| and sqrt(gH) over the faces' cells bound every face speed
  const IndexBox b = patch.box().grown(1);
  const int M = patch.num_layers();
  double umax = 0.0;
  double hmax = 0.0;
  bool wet = false;
  for (int j = b.lo_j; j <= b.hi_j; ++j) {
    for (int i = b.lo_i; i <= b.hi_i; ++i) {
      double total = 0.0;
      for (int m = 0; m < M; ++m) {
        const double h = patch.h(m, i, j);
        total += h;
        if (h > params.dry_tolerance) {
          wet = true;
          umax = std::max({umax, std::fabs(patch.hu(m, i, j) / h), std::fabs(patch.hv(m, i, j) / h)});
        }
      }
      hmax = std::max(hmax, total);
    }
  }
  const double smax = umax + external_wave_speed(hmax, params.gravity);
  if (!wet || !(smax > 0.0)) return dt_max;
  return std::min(dt_max, cfl_target * std::min(dx, dy) / smax);
}

void fill_physical_boundaries(Patch& p, const IndexBox& dom, const BoundarySet& bc) {
  const IndexBox gb = p.ghost_box();
  const int M = p.num_layers();
  const int ncomp = p.num_components();
  auto copy_cell = [&](int i, int j, int si, int sj, bool flip_u, bool flip_v) {
    const std::size_t d = p.index(i, j);
    const std::size_t s = p.index(si, sj);
    for (int c = 0; c < ncomp; ++c) p.component(c)[d] = p.component(c)[s];
    for (int m = 0; m < M; ++m) {
      if (flip_u) p.component(2 + 3 * m)[d] = -p.component(2 + 3 * m)[d];
      if (flip_v) p.component(3 + 3 * m)[d] = -p.component(3 + 3 * m)[d];
    }
  };
  for (int j = gb.lo_j; j <= gb.hi_j; ++j) {
    for (int i = gb.lo_i; i < dom.lo_i; ++i) {
      const bool wall = bc.left == BoundaryKind::wall;
      copy_cell(i, j, wall ? 2 * dom.lo_i - 1 - i : dom.lo_i, j, wall, false);
    }
    for (int i = dom.hi_i + 1; i <= gb.hi_i; ++i) {
      const bool wall = bc.right == BoundaryKind::wall;
      copy_cell(i, j, wall ? 2 * dom.hi_i + 1 - i : dom.hi_i, j, wall, false);
    }
  }
  for (int i = gb.lo_i; i <= gb.hi_i; ++i) {
    for (int j = gb.lo_j; j < dom.lo_j; ++j) {
      const bool wall = bc.bottom == BoundaryKind::wall;
      copy_cell(i, j, i, wall ? 2 * dom.lo_j - 1 - j : dom.lo_j, false, wall);
    }
    for (int j = dom.hi_j + 1; j <= gb.hi_j; ++j) {
      const bool wall = bc.top == BoundaryKind::wall;
      copy_cell(i, j, i, wall ? 2 * dom.hi_j + 1 - j : dom.hi_j, false, wall);
    }
  }
}

double layer_volume(const Patch& p, int m, double dx, double dy) {
  const IndexBox b = p.box();
  double sum = 0.0;
  for (int j = b.lo_j; j <= b.hi_j; ++j) {
    const double* row = p.component(1 + 3 * m) + p.index(b.lo_i, j);
    for (int i = 0; i < b.nx(); ++i) sum += row[i];
  }
  return sum * dx * dy;
}

}  // namespace mlamr
