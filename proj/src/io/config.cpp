#include "mlamr/io/config.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <fstream>
#include <functional>
#include <map>
#include <ostream>
#include <sstream>

namespace mlamr::io {

ConfigError::ConfigError(std::string key, const std::string& message)
    : std::runtime_error(key.empty() ? message : key + ": " + message), key_(std::move(key)) {}

namespace {

std::string trim(std::string_view s) {
  std::size_t a = 0, b = s.size();
  while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
  while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
  return std::string(s.substr(a, b - a));
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string cur;
  std::istringstream in(s);
  while (std::getline(in, cur, sep)) out.push_back(trim(cur));
  if (!s.empty() && s.back() == sep) out.emplace_back();
  return out;
}

std::string fmt(double v) {
  char buf[64];
  auto r = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, r.ptr);
}

template <class T>
std::string fmt_list(const std::vector<T>& v) {
  std::string s;
  for (std::size_t k = 0; k < v.size(); ++k) {
    if (k) s += ", ";
    if constexpr (std::is_floating_point_v<T>) s += fmt(v[k]);
    else s += std::to_string(v[k]);
  }
  return s;
}

double to_double(const std::string& key, const std::string& v) {
  double x = 0.0;
  auto r = std::from_chars(v.data(), v.data() + v.size(), x);
  if (v.empty() || r.ec != std::errc() || r.ptr != v.data() + v.size())
    throw ConfigError(key, "expected a number, got '" + v + "'");
  return x;
}

int to_int(const std::string& key, const std::string& v) {
  int x = 0;
  auto r = std::from_chars(v.data(), v.data() + v.size(), x);
  if (v.empty() || r.ec != std::errc() || r.ptr != v.data() + v.size())
    throw ConfigError(key, "expected an integer, got '" + v + "'");
  return x;
}

bool to_bool(const std::string& key, const std::string& v) {
  std::string s = v;
  std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return std::tolower(c); });
  if (s == "true" || s == "yes" || s == "on" || s == "1") return true;
  if (s == "false" || s == "no" || s == "off" || s == "0") return false;
  throw ConfigError(key, "expected true or false, got '" + v + "'");
}

std::vector<double> to_doubles(const std::string& key, const std::string& v) {
  std::vector<double> out;
  if (trim(v).empty()) return out;
  const auto parts = split(v, ',');
  for (std::size_t k = 0; k < parts.size(); ++k)
    out.push_back(to_double(key + "[" + std::to_string(k) + "]", parts[k]));
  return out;
}

std::vector<int> to_ints(const std::string& key, const std::string& v) {
  std::vector<int> out;
  const auto parts = split(v, ',');
  for (std::size_t k = 0; k < parts.size(); ++k)
    out.push_back(to_int(key + "[" + std::to_string(k) + "]", parts[k]));
  return out;
}

BoundaryKind to_boundary(const std::string& key, const std::string& v) {
  if (v == "wall") return BoundaryKind::wall;
  if (v == "outflow") return BoundaryKind::outflow;
  throw ConfigError(key, "expected wall or outflow, got '" + v + "'");
}

void require(bool ok, const std::string& key, const std::string& what) {
  if (!ok) throw ConfigError(key, what);
}

// Resolved values that are spread over several structures while parsing.
struct Staging {
  int levels = 3;
  std::vector<int> rx{4, 4};
  std::vector<int> ry{4, 4};
  std::vector<int> rt{};
  double density_ratio = 0.95;
};

struct Entry {
  std::string key;
  std::function<void(const std::string&)> set;
  std::function<std::string()> show;
};

std::vector<Entry> registry(RunConfig& c, Staging& st) {
  Scenario& s = c.scenario;
  SimulationSettings& g = c.settings;
  RegridPolicy& p = g.policy;
  std::vector<Entry> e;
  auto num = [&e](std::string key, double& ref, std::function<bool(double)> ok, std::string why) {
    e.push_back({key,
                 [key, &ref, ok, why](const std::string& v) {
                   const double x = to_double(key, v);
                   require(ok(x), key, why);
                   ref = x;
                 },
                 [&ref] { return fmt(ref); }});
  };
  auto integer = [&e](std::string key, int& ref, int lo, std::string why) {
    e.push_back({key,
                 [key, &ref, lo, why](const std::string& v) {
                   const int x = to_int(key, v);
                   require(x >= lo, key, why);
                   ref = x;
                 },
                 [&ref] { return std::to_string(ref); }});
  };
  auto flag = [&e](std::string key, bool& ref) {
    e.push_back({key, [key, &ref](const std::string& v) { ref = to_bool(key, v); },
                 [&ref] { return std::string(ref ? "true" : "false"); }});
  };
  auto boundary = [&e](std::string key, BoundaryKind& ref) {
    e.push_back({key, [key, &ref](const std::string& v) { ref = to_boundary(key, v); },
                 [&ref] { return std::string(to_string(ref)); }});
  };
  auto any = [](double) { return true; };
  auto positive = [](double x) { return x > 0.0; };

  e.push_back({"scenario.name", [&s](const std::string& v) { s.name = v; },
               [&s] { return s.name; }});
  e.push_back({"scenario.kind",
               [&s](const std::string& v) {
                 if (v == "pulse") s.kind = InitialKind::pulse;
                 else if (v == "dam_break") s.kind = InitialKind::dam_break;
                 else throw ConfigError("scenario.kind", "expected pulse or dam_break, got '" + v + "'");
               },
               [&s] { return std::string(to_string(s.kind)); }});
  num("scenario.x_lower", s.domain.x_lower, any, "");
  num("scenario.x_upper", s.domain.x_upper, any, "");
  num("scenario.y_lower", s.domain.y_lower, any, "");
  num("scenario.y_upper", s.domain.y_upper, any, "");
  num("scenario.bed_deep", s.bed_deep, any, "");
  num("scenario.bed_shelf", s.bed_shelf, any, "");
  num("scenario.shelf_x", s.shelf_x, any, "");
  num("scenario.sea_level", s.sea_level, any, "");
  num("scenario.interface_level", s.interface_level, any, "");
  num("scenario.wave_amplitude", s.wave_amplitude, any, "");
  num("scenario.wave_center", s.wave_center, any, "");
  num("scenario.wave_width", s.wave_width, positive, "must be positive");
  flag("scenario.wave_moving", s.wave_moving);
  num("scenario.dam_x", s.dam_x, any, "");
  num("scenario.dam_left", s.dam_left, any, "");
  num("scenario.dam_right", s.dam_right, any, "");
  boundary("scenario.bc_left", s.bc.left);
  boundary("scenario.bc_right", s.bc.right);
  boundary("scenario.bc_bottom", s.bc.bottom);
  boundary("scenario.bc_top", s.bc.top);
  num("scenario.final_time", s.final_time, positive, "must be positive");
  e.push_back({"scenario.frame_times",
               [&s](const std::string& v) {
                 s.frame_times = to_doubles("scenario.frame_times", v);
                 require(std::is_sorted(s.frame_times.begin(), s.frame_times.end()),
                         "scenario.frame_times", "must be sorted");
                 for (double t : s.frame_times)
                   require(t >= 0.0, "scenario.frame_times", "must be non-negative");
               },
               [&s] { return fmt_list(s.frame_times); }});

  integer("physics.layers", g.params.num_layers, 1, "must be 1 or 2");
  num("physics.density_ratio", st.density_ratio, [](double r) { return r > 0.0 && r < 1.0; },
      "must lie in (0, 1)");
  num("physics.gravity", g.params.gravity, positive, "must be positive");
  num("physics.dry_tolerance", g.params.dry_tolerance, positive, "must be positive");
  num("physics.cfl", g.cfl, [](double x) { return x > 0.0 && x <= 1.0; }, "must lie in (0, 1]");
  num("physics.dt_max", g.dt_max, positive, "must be positive");

  flag("amr.enabled", c.amr);
  integer("amr.coarse_nx", g.coarse_nx, 4, "must be >= 4");
  integer("amr.coarse_ny", g.coarse_ny, 4, "must be >= 4");
  integer("amr.levels", st.levels, 1, "must be >= 1");
  auto ratios = [&e](std::string key, std::vector<int>& ref, int lo) {
    e.push_back({key,
                 [key, &ref, lo](const std::string& v) {
                   ref = to_ints(key, v);
                   for (std::size_t k = 0; k < ref.size(); ++k)
                     require(ref[k] >= lo, key + "[" + std::to_string(k) + "]",
                             "refinement ratio must be >= " + std::to_string(lo) + ", got " +
                                 std::to_string(ref[k]));
                 },
                 [&ref] { return fmt_list(ref); }});
  };
  ratios("amr.ratio_x", st.rx, 2);
  ratios("amr.ratio_y", st.ry, 2);
  ratios("amr.ratio_t", st.rt, 1);
  e.push_back({"amr.wave_tolerance",
               [&p](const std::string& v) {
                 p.wave_tolerance = to_doubles("amr.wave_tolerance", v);
                 require(!p.wave_tolerance.empty(), "amr.wave_tolerance", "needs a value");
                 for (double t : p.wave_tolerance)
                   require(t > 0.0, "amr.wave_tolerance", "must be positive");
               },
               [&p] { return fmt_list(p.wave_tolerance); }});
  integer("amr.regrid_interval", p.regrid_interval, 1, "must be >= 1");
  integer("amr.buffer_width", p.buffer_width, 0, "must be >= 0");
  num("amr.efficiency", p.efficiency_target, [](double x) { return x > 0.0 && x <= 1.0; },
      "must lie in (0, 1]");
  flag("amr.flag_fronts", p.flag_fronts);
  e.push_back({"amr.allowed_regions",
               [&p](const std::string& v) {
                 p.allowed_regions.clear();
                 for (const auto& r : split(v, ';')) {
                   if (r.empty()) continue;
                   const auto xs = to_doubles("amr.allowed_regions", r);
                   require(xs.size() == 4, "amr.allowed_regions",
                           "each region is x_lower, x_upper, y_lower, y_upper");
                   require(xs[0] < xs[1] && xs[2] < xs[3], "amr.allowed_regions",
                           "region bounds must be increasing");
                   p.allowed_regions.push_back({xs[0], xs[1], xs[2], xs[3]});
                 }
               },
               [&p] {
                 std::string out;
                 for (const auto& r : p.allowed_regions) {
                   if (!out.empty()) out += "; ";
                   out += fmt(r.x_lower) + ", " + fmt(r.x_upper) + ", " + fmt(r.y_lower) + ", " +
                          fmt(r.y_upper);
                 }
                 return out;
               }});

  integer("run.workers", g.workers, 1, "must be >= 1");
  e.push_back({"output.directory", [&c](const std::string& v) { c.output_dir = v; },
               [&c] { return c.output_dir; }});
  flag("output.text_frames", c.text_frames);
  return e;
}

void finish(RunConfig& c, const Staging& st) {
  auto& g = c.settings;
  require(g.params.num_layers == 1 || g.params.num_layers == 2, "physics.layers", "must be 1 or 2");
  g.params.densities = g.params.num_layers == 1 ? std::vector<double>{1.0}
                                                : std::vector<double>{st.density_ratio, 1.0};
  const std::size_t nr = static_cast<std::size_t>(st.levels - 1);
  require(st.rx.size() >= nr, "amr.ratio_x", "needs levels - 1 = " + std::to_string(nr) + " entries");
  require(st.ry.size() >= nr, "amr.ratio_y", "needs levels - 1 = " + std::to_string(nr) + " entries");
  require(st.rt.empty() || st.rt.size() >= nr, "amr.ratio_t",
          "needs levels - 1 = " + std::to_string(nr) + " entries");
  g.ratios.clear();
  for (std::size_t k = 0; k < nr; ++k) {
    RefinementRatio r{st.rx[k], st.ry[k], st.rt.empty() ? std::max(st.rx[k], st.ry[k]) : st.rt[k]};
    g.ratios.push_back(r);
  }
  auto& s = c.scenario;
  require(s.domain.x_upper > s.domain.x_lower, "scenario.x_upper", "must exceed x_lower");
  require(s.domain.y_upper > s.domain.y_lower, "scenario.y_upper", "must exceed y_lower");
  g.domain = s.domain;
  g.final_time = s.final_time;
  g.frame_times = s.frame_times;
  for (double t : s.frame_times)
    require(t <= s.final_time, "scenario.frame_times", "must not exceed final_time");
  try {
    s.validate(g.params);
  } catch (const std::invalid_argument& ex) {
    throw ConfigError("scenario", ex.what());
  }
}

std::string key_of(const std::vector<Entry>& reg, std::size_t k) { return reg[k].key; }

}  // namespace

RunConfig parse_config_text(const std::string& text, const std::string& origin) {
  RunConfig cfg;
  Staging st;
  auto reg = registry(cfg, st);
  std::map<std::string, std::size_t> index;
  for (std::size_t k = 0; k < reg.size(); ++k) index[key_of(reg, k)] = k;

  std::map<std::string, int> seen;
  std::istringstream in(text);
  std::string raw;
  std::string section;
  int line = 0;
  while (std::getline(in, raw)) {
    ++line;
    // '#' starts a comment anywhere, ';' only at the start of a line
    const auto hash = raw.find('#');
    std::string ln = trim(hash == std::string::npos ? raw : raw.substr(0, hash));
    if (ln.empty() || ln.front() == ';') continue;
    const std::string where = origin + ":" + std::to_string(line);
    if (ln.front() == '[') {
      if (ln.back() != ']') throw ConfigError("", where + ": malformed section header");
      section = trim(std::string_view(ln).substr(1, ln.size() - 2));
      continue;
    }
    const auto eq = ln.find('=');
    if (eq == std::string::npos) throw ConfigError("", where + ": expected key = value");
    const std::string key = (section.empty() ? "" : section + ".") + trim(ln.substr(0, eq));
    const std::string value = trim(ln.substr(eq + 1));
    auto it = index.find(key);
    if (it == index.end()) throw ConfigError(key, "unknown key (" + where + ")");
    if (seen.count(key)) throw ConfigError(key, "given twice (" + where + ")");
    seen[key] = line;
    reg[it->second].set(value);
  }
  for (const auto& e : reg)
    if (!seen.count(e.key)) cfg.defaulted.push_back(e.key);
  finish(cfg, st);
  return cfg;
}

RunConfig parse_config(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw ConfigError("", "cannot open config file " + path);
  std::ostringstream ss;
  ss << f.rdbuf();
  return parse_config_text(ss.str(), path);
}

void echo_config(const RunConfig& cfg, std::ostream& out) {
  RunConfig copy = cfg;
  Staging st;
  st.levels = static_cast<int>(cfg.settings.ratios.size()) + 1;
  st.rx.clear();
  st.ry.clear();
  for (const auto& r : cfg.settings.ratios) {
    st.rx.push_back(r.x);
    st.ry.push_back(r.y);
    st.rt.push_back(r.t);
  }
  st.density_ratio = cfg.settings.params.density_ratio();
  const auto reg = registry(copy, st);
  std::string section;
  for (const auto& e : reg) {
    const auto dot = e.key.find('.');
    const std::string sec = e.key.substr(0, dot);
    if (sec != section) {
      out << "[" << sec << "]\n";
      section = sec;
    }
    const bool def = std::find(cfg.defaulted.begin(), cfg.defaulted.end(), e.key) != cfg.defaulted.end();
    out << "  " << e.key.substr(dot + 1) << " = " << e.show() << (def ? "  (default)" : "") << "\n";
  }
  out << "# r = (";
  for (std::size_t k = 0; k < cfg.settings.ratios.size(); ++k)
    out << (k ? "," : "") << cfg.settings.ratios[k].x;
  out << "), levels = " << cfg.settings.ratios.size() + 1 << "\n";
}

RunConfig uniform_equivalent(const RunConfig& cfg) {
  RunConfig u = cfg;
  for (const auto& r : cfg.settings.ratios) {
    u.settings.coarse_nx *= r.x;
    u.settings.coarse_ny *= r.y;
  }
  u.settings.ratios.clear();
  u.amr = false;
  return u;
}

}  // namespace mlamr::io
