#include "mlamr/io/frame.hpp"

#include <bit>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <sstream>

namespace mlamr::io {

static_assert(std::endian::native == std::endian::little, "frame payload assumes little-endian");

double Frame::surface(const FramePatch& p, std::size_t cell, int m) const {
  const std::size_t n = static_cast<std::size_t>(p.values_per_cell(num_layers));
  const double* c = p.values.data() + cell * n;
  double eta = c[0];
  for (int k = m; k < num_layers; ++k) eta += c[1 + 3 * k];
  return eta;
}

Frame make_frame(const Hierarchy& h, double time) {
  Frame f;
  f.time = time;
  f.num_layers = h.num_layers();
  f.domain = h.ladder().domain();
  for (int l = 1; l <= h.max_levels(); ++l) {
    const LevelSpec& s = h.ladder().level(l);
    f.levels.push_back({s.nx, s.ny, s.dx, s.dy});
  }
  for (int l = 1; l <= h.max_levels(); ++l) {
    for (const Patch& p : h.patches(l)) {
      FramePatch fp;
      fp.level = l;
      fp.box = p.box();
      const int nc = p.num_components();
      fp.values.reserve(static_cast<std::size_t>(p.box().num_cells() * nc));
      for (int j = fp.box.lo_j; j <= fp.box.hi_j; ++j)
        for (int i = fp.box.lo_i; i <= fp.box.hi_i; ++i)
          for (int c = 0; c < nc; ++c) fp.values.push_back(p.component(c)[p.index(i, j)]);
      f.patches.push_back(std::move(fp));
    }
  }
  return f;
}

namespace {

std::string g17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace

void write_frame(const Frame& f, const std::string& path, bool text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw FrameError("cannot open " + path + " for writing");
  out << "mlamr-frame " << f.version << "\n";
  out << "encoding " << (text ? "text" : "binary") << "\n";
  out << "time " << g17(f.time) << "\n";
  out << "layers " << f.num_layers << "\n";
  out << "domain " << g17(f.domain.x_lower) << " " << g17(f.domain.x_upper) << " "
      << g17(f.domain.y_lower) << " " << g17(f.domain.y_upper) << "\n";
  out << "levels " << f.levels.size() << "\n";
  for (std::size_t k = 0; k < f.levels.size(); ++k)
    out << "level " << k + 1 << " " << f.levels[k].nx << " " << f.levels[k].ny << " "
        << g17(f.levels[k].dx) << " " << g17(f.levels[k].dy) << "\n";
  out << "patches " << f.patches.size() << "\n";
  out << "end\n";
  for (const FramePatch& p : f.patches) {
    if (text) {
      out << "patch " << p.level << " " << p.box.lo_i << " " << p.box.lo_j << " " << p.box.hi_i
          << " " << p.box.hi_j << "\n";
      const std::size_t n = static_cast<std::size_t>(p.values_per_cell(f.num_layers));
      for (std::size_t c = 0; c < p.values.size(); c += n) {
        for (std::size_t k = 0; k < n; ++k) out << (k ? "," : "") << g17(p.values[c + k]);
        out << "\n";
      }
    } else {
      const std::int32_t head[5] = {p.level, p.box.lo_i, p.box.lo_j, p.box.hi_i, p.box.hi_j};
      out.write(reinterpret_cast<const char*>(head), sizeof head);
      out.write(reinterpret_cast<const char*>(p.values.data()),
                static_cast<std::streamsize>(p.values.size() * sizeof(double)));
    }
  }
  out.flush();
  if (!out) throw FrameError("write failed for " + path);
}

void write_frame(const Hierarchy& h, double time, const std::string& path, bool text) {
  write_frame(make_frame(h, time), path, text);
}

namespace {

std::string expect_line(std::istream& in, const std::string& path, const std::string& word) {
  std::string line;
  if (!std::getline(in, line)) throw FrameError(path + ": truncated header, expected '" + word + "'");
  if (line.rfind(word + " ", 0) != 0 && line != word)
    throw FrameError(path + ": expected '" + word + "', got '" + line + "'");
  return line.size() > word.size() ? line.substr(word.size() + 1) : std::string();
}

}  // namespace

Frame read_frame(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FrameError("cannot open " + path);
  Frame f;
  f.version = std::stoi(expect_line(in, path, "mlamr-frame"));
  if (f.version != kFrameVersion)
    throw FrameError(path + ": frame format version " + std::to_string(f.version) +
                     " is not supported (expected " + std::to_string(kFrameVersion) + ")");
  const std::string enc = expect_line(in, path, "encoding");
  if (enc != "text" && enc != "binary") throw FrameError(path + ": unknown encoding '" + enc + "'");
  const bool text = enc == "text";
  f.time = std::strtod(expect_line(in, path, "time").c_str(), nullptr);
  f.num_layers = std::stoi(expect_line(in, path, "layers"));
  {
    std::istringstream ds(expect_line(in, path, "domain"));
    std::string a, b, c, d;
    ds >> a >> b >> c >> d;
    f.domain = {std::strtod(a.c_str(), nullptr), std::strtod(b.c_str(), nullptr),
                std::strtod(c.c_str(), nullptr), std::strtod(d.c_str(), nullptr)};
  }
  const int nl = std::stoi(expect_line(in, path, "levels"));
  for (int k = 0; k < nl; ++k) {
    std::istringstream ls(expect_line(in, path, "level"));
    int idx = 0;
    FrameLevel lv;
    std::string dx, dy;
    ls >> idx >> lv.nx >> lv.ny >> dx >> dy;
    lv.dx = std::strtod(dx.c_str(), nullptr);
    lv.dy = std::strtod(dy.c_str(), nullptr);
    f.levels.push_back(lv);
  }
  const long np = std::stol(expect_line(in, path, "patches"));
  expect_line(in, path, "end");
  const std::size_t n = static_cast<std::size_t>(1 + 3 * f.num_layers);
  for (long k = 0; k < np; ++k) {
    FramePatch p;
    if (text) {
      std::istringstream ps(expect_line(in, path, "patch"));
      ps >> p.level >> p.box.lo_i >> p.box.lo_j >> p.box.hi_i >> p.box.hi_j;
      std::string row;
      for (std::int64_t c = 0; c < p.box.num_cells(); ++c) {
        if (!std::getline(in, row)) throw FrameError(path + ": truncated patch data");
        std::istringstream rs(row);
        std::string v;
        std::size_t got = 0;
        while (std::getline(rs, v, ',')) {
          p.values.push_back(std::strtod(v.c_str(), nullptr));
          ++got;
        }
        if (got != n) throw FrameError(path + ": wrong value count in patch row");
      }
    } else {
      std::int32_t head[5];
      if (!in.read(reinterpret_cast<char*>(head), sizeof head))
        throw FrameError(path + ": truncated patch header");
      p.level = head[0];
      p.box = {head[1], head[2], head[3], head[4]};
      p.values.resize(static_cast<std::size_t>(p.box.num_cells()) * n);
      if (!in.read(reinterpret_cast<char*>(p.values.data()),
                   static_cast<std::streamsize>(p.values.size() * sizeof(double))))
        throw FrameError(path + ": truncated patch data");
    }
    if (p.level < 1 || p.level > nl || p.box.empty())
      throw FrameError(path + ": bad patch record " + std::to_string(k));
    f.patches.push_back(std::move(p));
  }
  return f;
}

std::vector<double> project_surface(const Frame& f, int m, int fine_nx, int fine_ny) {
  std::vector<double> out(static_cast<std::size_t>(fine_nx) * static_cast<std::size_t>(fine_ny),
                          std::nan(""));
  for (std::size_t l = 1; l <= f.levels.size(); ++l) {
    const FrameLevel& lv = f.levels[l - 1];
    if (fine_nx % lv.nx != 0 || fine_ny % lv.ny != 0)
      throw FrameError("level " + std::to_string(l) + " does not divide the comparison grid");
    const int fx = fine_nx / lv.nx;
    const int fy = fine_ny / lv.ny;
    for (const FramePatch& p : f.patches) {
      if (p.level != static_cast<int>(l)) continue;
      std::size_t cell = 0;
      for (int j = p.box.lo_j; j <= p.box.hi_j; ++j) {
        for (int i = p.box.lo_i; i <= p.box.hi_i; ++i, ++cell) {
          const double eta = f.surface(p, cell, m);
          for (int b = 0; b < fy; ++b)
            for (int a = 0; a < fx; ++a)
              out[static_cast<std::size_t>(j * fy + b) * static_cast<std::size_t>(fine_nx) +
                  static_cast<std::size_t>(i * fx + a)] = eta;
        }
      }
    }
  }
  return out;
}

double compare_l1(const Frame& a, const Frame& b, int m) {
  if (a.levels.empty() || b.levels.empty()) throw FrameError("frame without levels");
  if (m >= a.num_layers || m >= b.num_layers) throw FrameError("layer not present in both frames");
  const FrameLevel& fa = a.levels.back();
  const FrameLevel& fb = b.levels.back();
  const int nx = std::max(fa.nx, fb.nx);
  const int ny = std::max(fa.ny, fb.ny);
  const auto pa = project_surface(a, m, nx, ny);
  const auto pb = project_surface(b, m, nx, ny);
  double sum = 0.0;
  for (std::size_t k = 0; k < pa.size(); ++k) {
    if (std::isnan(pa[k]) || std::isnan(pb[k])) throw FrameError("frame does not cover the domain");
    sum += std::fabs(pa[k] - pb[k]);
  }
  return sum / static_cast<double>(pa.size());
}

}  // namespace mlamr::io
