#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>

#include "CLI11.hpp"
#include "mlamr/driver.hpp"
#include "mlamr/io/config.hpp"
#include "mlamr/io/frame.hpp"
#include "mlamr/io/report.hpp"

namespace fs = std::filesystem;
using namespace mlamr;

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitNumerical = 3;

std::string frame_name(int k, bool text) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "frame_%04d.%s", k, text ? "txt" : "frame");
  return buf;
}

int do_run(const std::string& config_path, std::optional<std::string> out_dir,
           std::optional<int> workers, bool no_amr, bool text_frames) {
  io::RunConfig cfg;
  try {
    cfg = io::parse_config(config_path);
    if (workers) {
      if (*workers < 1) throw io::ConfigError("--workers", "must be >= 1");
      cfg.settings.workers = *workers;
    }
    if (out_dir) cfg.output_dir = *out_dir;
    if (text_frames) cfg.text_frames = true;
    if (no_amr || !cfg.amr) cfg = io::uniform_equivalent(cfg);
  } catch (const io::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  }
  std::cout << "# resolved configuration\n";
  io::echo_config(cfg, std::cout);

  std::error_code ec;
  fs::create_directories(cfg.output_dir, ec);
  if (ec) {
    std::cerr << "cannot create output directory " << cfg.output_dir << ": " << ec.message() << "\n";
    return 1;
  }
  const fs::path dir(cfg.output_dir);

  std::optional<Simulation> sim;
  try {
    sim.emplace(cfg.settings, cfg.scenario);
    sim->initialize();
  } catch (const std::invalid_argument& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const GeometryError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  }

  int frame_no = 0;
  try {
    const RunStats stats = sim->run([&](const Hierarchy& h, double t) {
      const fs::path p = dir / frame_name(frame_no++, cfg.text_frames);
      io::write_frame(h, t, p.string(), cfg.text_frames);
      std::cout << "frame " << p.string() << " t=" << t << "\n";
    });
    io::write_stats(stats, (dir / "stats.json").string());
    std::cout << "steps " << stats.coarse_steps << "  regrids " << stats.regrids
              << "  cell updates " << stats.total_cell_updates << "  wall " << stats.wall_time
              << " s  cpu " << stats.cpu_time << " s\n";
    for (int m = 0; m < stats.num_layers; ++m)
      std::cout << "layer " << m + 1 << " mass " << stats.initial_mass[m] << " -> "
                << stats.final_mass[m] << " (drift " << stats.mass_drift()[m] << ")\n";
    if (stats.hyperbolicity_warnings > 0)
      std::cout << "hyperbolicity warnings " << stats.hyperbolicity_warnings << "\n";
  } catch (const NumericalError& e) {
    const fs::path p = dir / "abort.frame";
    std::cerr << "numerical abort at t=" << sim->time() << ": " << e.what() << "\n";
    try {
      io::write_frame(sim->hierarchy(), sim->time(), p.string(), false);
      std::cerr << "diagnostic frame written to " << p.string() << "\n";
    } catch (const std::exception& w) {
      std::cerr << "diagnostic frame not written: " << w.what() << "\n";
    }
    return kExitNumerical;
  }
  return 0;
}

int do_report(const std::string& amr_path, const std::optional<std::string>& uni_path,
              const std::optional<std::string>& out) {
  const RunStats amr = io::read_stats(amr_path);
  std::optional<RunStats> uni;
  if (uni_path) uni = io::read_stats(*uni_path);
  const std::string table = io::format_report(amr, uni);
  std::cout << table;
  if (out) {
    std::ofstream f(*out);
    if (!(f << table)) throw std::runtime_error("cannot write report " + *out);
  }
  return 0;
}

int do_compare(const std::string& a, const std::string& b, const std::string& norm, int layer) {
  if (norm != "l1") throw std::runtime_error("unsupported norm '" + norm + "'");
  const io::Frame fa = io::read_frame(a);
  const io::Frame fb = io::read_frame(b);
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", io::compare_l1(fa, fb, layer - 1));
  std::cout << "l1 " << buf << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"two-layer shallow water AMR simulator"};
  app.require_subcommand(1);

  auto* run = app.add_subcommand("run", "run a configuration");
  std::string config;
  std::optional<std::string> out_dir;
  std::optional<int> workers;
  bool no_amr = false, text_frames = false;
  run->add_option("config", config, "configuration file")->required();
  run->add_option("--out", out_dir, "output directory");
  run->add_option("--workers", workers, "patch worker threads");
  run->add_flag("--no-amr", no_amr, "run the uniform finest grid instead");
  run->add_flag("--text-frames", text_frames, "write CSV frames");

  auto* report = app.add_subcommand("report", "tabulate run statistics");
  std::string stats_amr;
  std::optional<std::string> stats_uni, report_out;
  report->add_option("stats_amr", stats_amr)->required();
  report->add_option("stats_uniform", stats_uni);
  report->add_option("--out", report_out, "also write the table here");

  auto* compare = app.add_subcommand("compare", "difference of two frames");
  std::string fa, fb, norm = "l1";
  int layer = 1;
  compare->add_option("frame_a", fa)->required();
  compare->add_option("frame_b", fb)->required();
  compare->add_option("--norm", norm, "norm (l1)");
  compare->add_option("--layer", layer, "surface index, 1 = free surface")->check(CLI::Range(1, 2));

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : kExitConfig;
  }
  try {
    if (*run) return do_run(config, out_dir, workers, no_amr, text_frames);
    if (*report) return do_report(stats_amr, stats_uni, report_out);
    if (*compare) return do_compare(fa, fb, norm, layer);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
