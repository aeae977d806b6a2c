#include <pybind11/functional.h>
#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <limits>
#include <memory>
#include <optional>
#include <sstream>
#include <stdexcept>

#include "mlamr/driver.hpp"
#include "mlamr/io/config.hpp"
#include "mlamr/io/frame.hpp"
#include "mlamr/io/report.hpp"
#include "mlamr/refine.hpp"
#include "mlamr/state.hpp"

namespace py = pybind11;
using namespace mlamr;

namespace {

py::dict stats_dict(const RunStats& s) {
  auto layers = [&](const LayerArray& a) {
    return std::vector<double>(a.begin(), a.begin() + s.num_layers);
  };
  py::dict d;
  d["num_layers"] = s.num_layers;
  d["num_levels"] = s.num_levels;
  d["wall_time"] = s.wall_time;
  d["cpu_time"] = s.cpu_time;
  d["total_cell_updates"] = s.total_cell_updates;
  d["level_cell_updates"] = s.level_cell_updates;
  d["coarse_steps"] = s.coarse_steps;
  d["regrids"] = s.regrids;
  d["final_time"] = s.final_time;
  d["initial_mass"] = layers(s.initial_mass);
  d["final_mass"] = layers(s.final_mass);
  d["regrid_delta"] = layers(s.regrid_delta);
  d["interface_delta"] = layers(s.interface_delta);
  d["boundary_delta"] = layers(s.boundary_delta);
  d["clip_delta"] = layers(s.clip_delta);
  d["accounted_mass"] = layers(s.accounted_mass());
  return d;
}

// Interior of a patch as an array of shape (components, ny, nx).
py::array_t<double> patch_array(const Patch& p) {
  const IndexBox b = p.box();
  py::array_t<double> out(std::vector<py::ssize_t>{p.num_components(), b.ny(), b.nx()});
  auto a = out.mutable_unchecked<3>();
  for (int c = 0; c < p.num_components(); ++c)
    for (int j = b.lo_j; j <= b.hi_j; ++j)
      for (int i = b.lo_i; i <= b.hi_i; ++i)
        a(c, j - b.lo_j, i - b.lo_i) = p.component(c)[p.index(i, j)];
  return out;
}

void check_layers(std::size_t n) {
  if (n < 1 || n > static_cast<std::size_t>(kMaxLayers))
    throw py::value_error("between 1 and " + std::to_string(kMaxLayers) + " layers expected");
}

py::tuple box_tuple(const IndexBox& b) { return py::make_tuple(b.lo_i, b.lo_j, b.hi_i, b.hi_j); }

py::dict frame_dict(const io::Frame& f) {
  py::dict d;
  d["time"] = f.time;
  d["num_layers"] = f.num_layers;
  d["domain"] = py::make_tuple(f.domain.x_lower, f.domain.x_upper, f.domain.y_lower, f.domain.y_upper);
  py::list levels;
  for (const auto& l : f.levels) levels.append(py::make_tuple(l.nx, l.ny, l.dx, l.dy));
  d["levels"] = levels;
  const int nc = 1 + 3 * f.num_layers;
  py::list patches;
  for (const auto& p : f.patches) {
    py::array_t<double> arr(std::vector<py::ssize_t>{p.box.ny(), p.box.nx(), nc});
    std::copy(p.values.begin(), p.values.end(), arr.mutable_data());
    py::dict pd;
    pd["level"] = p.level;
    pd["box"] = box_tuple(p.box);
    pd["values"] = arr;
    patches.append(pd);
  }
  d["patches"] = patches;
  return d;
}

// Owns the configuration the simulation refers to.
struct PySimulation {
  explicit PySimulation(io::RunConfig c) : cfg(std::move(c)), sim(cfg.settings, cfg.scenario) {}
  io::RunConfig cfg;
  Simulation sim;
};

}  // namespace

PYBIND11_MODULE(_mlamr, m) {
  m.doc() = "Two-layer shallow water AMR core";

  py::register_exception<io::ConfigError>(m, "ConfigError", PyExc_ValueError);
  py::register_exception<io::FrameError>(m, "FrameError", PyExc_ValueError);
  py::register_exception<GeometryError>(m, "GeometryError", PyExc_RuntimeError);

  py::class_<io::RunConfig>(m, "Config")
      .def_property(
          "coarse_nx", [](const io::RunConfig& c) { return c.settings.coarse_nx; },
          [](io::RunConfig& c, int v) { c.settings.coarse_nx = v; })
      .def_property(
          "coarse_ny", [](const io::RunConfig& c) { return c.settings.coarse_ny; },
          [](io::RunConfig& c, int v) { c.settings.coarse_ny = v; })
      .def_property(
          "final_time", [](const io::RunConfig& c) { return c.settings.final_time; },
          [](io::RunConfig& c, double v) { c.settings.final_time = v; })
      .def_property(
          "frame_times", [](const io::RunConfig& c) { return c.settings.frame_times; },
          [](io::RunConfig& c, std::vector<double> v) { c.settings.frame_times = std::move(v); })
      .def_property(
          "workers", [](const io::RunConfig& c) { return c.settings.workers; },
          [](io::RunConfig& c, int v) { c.settings.workers = v; })
      .def_property(
          "wave_amplitude", [](const io::RunConfig& c) { return c.scenario.wave_amplitude; },
          [](io::RunConfig& c, double v) { c.scenario.wave_amplitude = v; })
      .def_property(
          "ratios",
          [](const io::RunConfig& c) {
            std::vector<std::tuple<int, int, int>> out;
            for (const auto& r : c.settings.ratios) out.emplace_back(r.x, r.y, r.t);
            return out;
          },
          [](io::RunConfig& c, const std::vector<std::tuple<int, int, int>>& v) {
            c.settings.ratios.clear();
            for (const auto& [x, y, t] : v) c.settings.ratios.push_back({x, y, t});
          })
      .def_readwrite("amr", &io::RunConfig::amr)
      .def_readwrite("output_dir", &io::RunConfig::output_dir)
      .def_readonly("defaulted", &io::RunConfig::defaulted)
      .def("echo", [](const io::RunConfig& c) {
        std::ostringstream os;
        io::echo_config(c, os);
        return os.str();
      })
      .def("uniform_equivalent", &io::uniform_equivalent);

  m.def("load_config", &io::parse_config, py::arg("path"));
  m.def("parse_config", &io::parse_config_text, py::arg("text"), py::arg("origin") = "<string>");

  py::class_<PySimulation>(m, "Simulation")
      .def(py::init<io::RunConfig>(), py::arg("config"))
      .def("initialize", [](PySimulation& s) { s.sim.initialize(); })
      .def(
          "step", [](PySimulation& s, double dt_limit) { return s.sim.step(dt_limit); },
          py::arg("dt_limit") = std::numeric_limits<double>::infinity())
      .def(
          "run",
          [](PySimulation& s, const std::function<void(double)>& on_frame) {
            RunStats st;
            if (on_frame) {
              st = s.sim.run([&](const Hierarchy&, double t) {
                py::gil_scoped_acquire gil;
                on_frame(t);
              });
            } else {
              py::gil_scoped_release release;
              st = s.sim.run();
            }
            return stats_dict(st);
          },
          py::arg("on_frame") = std::function<void(double)>{})
      .def_property_readonly("time", [](const PySimulation& s) { return s.sim.time(); })
      .def_property_readonly("active_levels",
                             [](const PySimulation& s) { return s.sim.hierarchy().active_levels(); })
      .def_property_readonly("stats", [](const PySimulation& s) { return stats_dict(s.sim.stats()); })
      .def(
          "patches",
          [](const PySimulation& s, int level) {
            py::list out;
            for (const Patch& p : s.sim.hierarchy().patches(level))
              out.append(py::make_tuple(box_tuple(p.box()), patch_array(p)));
            return out;
          },
          py::arg("level"))
      .def(
          "write_frame",
          [](const PySimulation& s, const std::string& path, bool text, std::optional<double> time) {
            io::write_frame(s.sim.hierarchy(), time.value_or(s.sim.time()), path, text);
          },
          py::arg("path"), py::arg("text") = false, py::arg("time") = std::nullopt);

  m.def("read_frame", [](const std::string& path) { return frame_dict(io::read_frame(path)); });
  m.def(
      "compare_l1",
      [](const std::string& a, const std::string& b, int layer) {
        return io::compare_l1(io::read_frame(a), io::read_frame(b), layer);
      },
      py::arg("a"), py::arg("b"), py::arg("layer") = 0);
  m.def("read_stats", [](const std::string& path) { return stats_dict(io::read_stats(path)); });
  m.def(
      "format_report",
      [](const std::string& amr, const std::optional<std::string>& uniform) {
        std::optional<RunStats> u;
        if (uniform) u = io::read_stats(*uniform);
        return io::format_report(io::read_stats(amr), u);
      },
      py::arg("amr_stats"), py::arg("uniform_stats") = std::nullopt);

  m.def("minmod", &minmod);
  m.def(
      "surfaces_from_depths",
      [](double bathy, const std::vector<double>& h) {
        check_layers(h.size());
        CellState c;
        c.num_layers = static_cast<int>(h.size());
        c.bathy = bathy;
        std::copy(h.begin(), h.end(), c.h.begin());
        const SurfaceSet s = surfaces_from_state(c);
        return std::vector<double>(s.eta.begin(), s.eta.begin() + c.num_layers);
      },
      py::arg("bathy"), py::arg("depths"));
  m.def(
      "depths_from_surfaces",
      [](double bathy, const std::vector<double>& eta, double dry_tolerance) {
        check_layers(eta.size());
        SurfaceSet s;
        s.num_layers = static_cast<int>(eta.size());
        std::copy(eta.begin(), eta.end(), s.eta.begin());
        const CellState c = state_from_surfaces(s, bathy, s.num_layers, dry_tolerance);
        return std::vector<double>(c.h.begin(), c.h.begin() + c.num_layers);
      },
      py::arg("bathy"), py::arg("surfaces"), py::arg("dry_tolerance") = 1e-3);
}
