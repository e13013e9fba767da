#pragma once
#include <optional>
#include <string>
#include <vector>

#include "ghostsim/scenario.hpp"

#include <json.hpp>

namespace ghostsim {

/// Command-line overrides layered on top of the scenario's [experiment]
/// section. Unset fields fall back to the scenario.
struct RunOverrides {
  std::optional<ExperimentType> experiment;
  std::optional<std::string> image_path;
  std::optional<LensMode> branch1, branch2;
  std::optional<double> tau_min, tau_max;
  std::optional<int> tau_steps;
  std::optional<int> rmax_px, rsteps;
  std::optional<bool> deinvert;
};

struct RunResult {
  int exit_code = 0;  ///< 0 ok; 1 when an in-scenario assertion fails
  nlohmann::ordered_json summary;
  std::vector<std::string> artifacts;  ///< paths written (atomically)
};

/// Runs one scenario and writes its artifacts under `out_dir`.
/// Every output embeds the scenario hash, seed, and tool version; metrics in
/// the JSON summary cover the residuals the experiment can measure in-run.
/// Throws ConfigError / PhysicsError / ResourceError / IoError; the CLI maps
/// those to exit codes 2 / 3 / 4 / 5.
RunResult run_scenario(const Scenario& sc, const std::string& out_dir,
                       const RunOverrides& overrides = {}, int threads = 0);

}  // namespace ghostsim
