#pragma once

#include <string>
#include <string_view>

#include "epimon/pde.hpp"
#include "epimon/series.hpp"

namespace epimon {

/// A simulation scenario as read from a JSON config.
///
/// Rate functions (`K_EI`, `K_IR`, `psi`) are a number, `{"table": [...]}`
/// with one sample per grid cell, or `{"steps": [[age, value], ...]}`
/// (piecewise constant from each age on). Initial profiles `E`, `I` are
/// `{"constant": c}`, `{"triangular": {"center", "half_width", "height"}}` or
/// `{"table": [...]}`. The kernel is `{"density": "psi" | "unit" | rate spec,
/// "point_masses": [{"age", "mass"}]}`.
struct Scenario {
  Epoch epoch;
  ModelParams params;
  DensityState init;
  ObservableKernel kernel;
  SimulationOptions options;
};

/// Throws DataError on malformed JSON or missing fields and
/// PreconditionError on model invariants.
Scenario parse_scenario(std::string_view json_text);
Scenario read_scenario_file(const std::string& path);

}  // namespace epimon
