#pragma once

#include <optional>
#include <string>

#include "mlamr/driver.hpp"

namespace mlamr::io {

void write_stats(const RunStats& stats, const std::string& path);
RunStats read_stats(const std::string& path);

/// Fixed-column table: wall time, CPU time and total cell updates per run,
/// then the AMR/uniform ratios. Baseline columns read "absent" without a baseline.
std::string format_report(const RunStats& amr, const std::optional<RunStats>& uniform);

struct ReportNumbers {
  double amr_updates = 0.0, amr_wall = 0.0, amr_cpu = 0.0;
  std::optional<double> uniform_updates, uniform_wall, uniform_cpu;
  std::optional<double> update_ratio, wall_ratio;  // percent, as printed
};

/// Reads back the raw counts and printed ratios of a formatted report.
ReportNumbers parse_report(const std::string& text);

/// Percent with two decimals, e.g. "7.20%".
std::string percent(double numerator, double denominator);

}  // namespace mlamr::io
