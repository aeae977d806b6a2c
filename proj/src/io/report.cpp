#include "mlamr/io/report.hpp"

#include <array>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "json.hpp"

namespace mlamr::io {

using nlohmann::json;

namespace {

json layers_json(const LayerArray& a, int n) {
  return json(std::vector<double>(a.begin(), a.begin() + n));
}

LayerArray layers_from(const json& j) {
  LayerArray a{};
  for (std::size_t k = 0; k < j.size() && k < a.size(); ++k) a[k] = j[k].get<double>();
  return a;
}

}  // namespace

void write_stats(const RunStats& s, const std::string& path) {
  const int n = s.num_layers;
  json j = {
      {"num_layers", s.num_layers},
      {"num_levels", s.num_levels},
      {"wall_time", s.wall_time},
      {"cpu_time", s.cpu_time},
      {"total_cell_updates", s.total_cell_updates},
      {"level_cell_updates", s.level_cell_updates},
      {"coarse_steps", s.coarse_steps},
      {"regrids", s.regrids},
      {"hyperbolicity_warnings", s.hyperbolicity_warnings},
      {"prefix_violations", s.prefix_violations},
      {"final_time", s.final_time},
      {"initial_mass", layers_json(s.initial_mass, n)},
      {"final_mass", layers_json(s.final_mass, n)},
      {"mass_drift", layers_json(s.mass_drift(), n)},
      {"regrid_delta", layers_json(s.regrid_delta, n)},
      {"interface_delta", layers_json(s.interface_delta, n)},
      {"boundary_delta", layers_json(s.boundary_delta, n)},
      {"clip_delta", layers_json(s.clip_delta, n)},
  };
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open " + path + " for writing");
  out << j.dump(2) << "\n";
  if (!out) throw std::runtime_error("write failed for " + path);
}

RunStats read_stats(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw std::runtime_error(path + ": " + e.what());
  }
  RunStats s;
  s.num_layers = j.at("num_layers").get<int>();
  s.num_levels = j.value("num_levels", 1);
  s.wall_time = j.at("wall_time").get<double>();
  s.cpu_time = j.at("cpu_time").get<double>();
  s.total_cell_updates = j.at("total_cell_updates").get<std::int64_t>();
  s.level_cell_updates = j.value("level_cell_updates", std::vector<std::int64_t>{});
  s.coarse_steps = j.value("coarse_steps", std::int64_t{0});
  s.regrids = j.value("regrids", std::int64_t{0});
  s.hyperbolicity_warnings = j.value("hyperbolicity_warnings", std::int64_t{0});
  s.prefix_violations = j.value("prefix_violations", std::int64_t{0});
  s.final_time = j.value("final_time", 0.0);
  s.initial_mass = layers_from(j.value("initial_mass", json::array()));
  s.final_mass = layers_from(j.value("final_mass", json::array()));
  s.regrid_delta = layers_from(j.value("regrid_delta", json::array()));
  s.interface_delta = layers_from(j.value("interface_delta", json::array()));
  s.boundary_delta = layers_from(j.value("boundary_delta", json::array()));
  s.clip_delta = layers_from(j.value("clip_delta", json::array()));
  return s;
}

std::string percent(double num, double den) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f%%", 100.0 * num / den);
  return buf;
}

std::string format_report(const RunStats& amr, const std::optional<RunStats>& uniform) {
  char line[160];
  std::ostringstream out;
  const char* head = "%-16s %16s %16s %22s\n";
  std::snprintf(line, sizeof line, head, "Run", "Wall Time (s)", "CPU Time (s)",
                "Total Cell Updates");
  out << line;
  if (uniform) {
    std::snprintf(line, sizeof line, "%-16s %16.3f %16.3f %22lld\n", "Without AMR",
                  uniform->wall_time, uniform->cpu_time,
                  static_cast<long long>(uniform->total_cell_updates));
  } else {
    std::snprintf(line, sizeof line, head, "Without AMR", "absent", "absent", "absent");
  }
  out << line;
  std::snprintf(line, sizeof line, "%-16s %16.3f %16.3f %22lld\n", "With AMR", amr.wall_time,
                amr.cpu_time, static_cast<long long>(amr.total_cell_updates));
  out << line;
  if (uniform) {
    const std::string w = percent(amr.wall_time, uniform->wall_time);
    const std::string c = percent(amr.cpu_time, uniform->cpu_time);
    const std::string u = percent(static_cast<double>(amr.total_cell_updates),
                                  static_cast<double>(uniform->total_cell_updates));
    std::snprintf(line, sizeof line, head, "AMR / uniform", w.c_str(), c.c_str(), u.c_str());
  } else {
    std::snprintf(line, sizeof line, head, "AMR / uniform", "absent", "absent", "absent");
  }
  out << line;
  return out.str();
}

namespace {

std::optional<double> cell(const std::string& tok) {
  if (tok == "absent") return std::nullopt;
  std::string t = tok;
  if (!t.empty() && t.back() == '%') t.pop_back();
  return std::stod(t);
}

}  // namespace

ReportNumbers parse_report(const std::string& text) {
  ReportNumbers r;
  std::istringstream in(text);
  std::string line;
  auto row = [](const std::string& ln, std::size_t label) {
    std::istringstream rs(ln.substr(label));
    std::string a, b, c;
    rs >> a >> b >> c;
    return std::array<std::optional<double>, 3>{cell(a), cell(b), cell(c)};
  };
  while (std::getline(in, line)) {
    if (line.rfind("Without AMR", 0) == 0) {
      const auto v = row(line, 11);
      r.uniform_wall = v[0];
      r.uniform_cpu = v[1];
      r.uniform_updates = v[2];
    } else if (line.rfind("With AMR", 0) == 0) {
      const auto v = row(line, 8);
      r.amr_wall = v[0].value_or(0.0);
      r.amr_cpu = v[1].value_or(0.0);
      r.amr_updates = v[2].value_or(0.0);
    } else if (line.rfind("AMR / uniform", 0) == 0) {
      const auto v = row(line, 13);
      r.wall_ratio = v[0];
      r.update_ratio = v[2];
    }
  }
  return r;
}

}  // namespace mlamr::io
