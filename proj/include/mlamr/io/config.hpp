#pragma once

#include <iosfwd>
#include <stdexcept>
#include <string>
#include <vector>

#include "mlamr/driver.hpp"
#include "mlamr/io/scenario.hpp"

namespace mlamr::io {

/// Bad or unknown configuration entry; `key()` is the section.key path.
class ConfigError : public std::runtime_error {
 public:
  ConfigError(std::string key, const std::string& message);
  const std::string& key() const { return key_; }

 private:
  std::string key_;
};

struct RunConfig {
  Scenario scenario;
  SimulationSettings settings;
  std::string output_dir = "out";
  bool text_frames = false;
  bool amr = true;
  std::vector<std::string> defaulted;  // keys resolved from defaults
};

RunConfig parse_config_text(const std::string& text, const std::string& origin = "<string>");
RunConfig parse_config(const std::string& path);

/// Prints every resolved setting, marking those taken from defaults.
void echo_config(const RunConfig& cfg, std::ostream& out);

/// Single-level run on the finest grid of `cfg` (the no-AMR baseline).
RunConfig uniform_equivalent(const RunConfig& cfg);

}  // namespace mlamr::io
