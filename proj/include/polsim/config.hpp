#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "polsim/experiment.hpp"

namespace polsim {

// A fully resolved run description: beamline, optional scan, engine and output
// choices. parse_config fills every default, so two textually different
// configs that mean the same run produce identical RunConfigs.
struct RunConfig {
  Beamline beamline;
  std::optional<ScanSpec> scan;
  Engine engine = Engine::Analytic;
  OracleOptions oracle;
  std::string csv_path;
  std::string report_path;
  std::uint64_t seed = 0;
  // One line per top-level section with all defaults applied; echoed into the
  // CSV metadata block so every output file records the run that produced it.
  std::vector<std::string> metadata_lines;
};

// Parse a JSON run configuration. Unknown keys anywhere are rejected by name.
// Defaults: wavelength 1.99 A / velocity 1990 m/s / polarization 0.98, guide
// field 1.079e-3 T, the canonical beamline, translator sweep 0..80 mm with 81
// points in the Larmor configuration, analytic engine.
RunConfig parse_config(const std::string& json_text);
RunConfig parse_config_file(const std::string& path);

// The all-defaults configuration ("{}").
RunConfig default_run_config();

std::string configuration_name(Configuration c);
std::string engine_name(Engine e);

}  // namespace polsim
