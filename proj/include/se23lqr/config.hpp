#pragma once

#include <string>
#include <vector>

#include "se23lqr/harness.hpp"

namespace se23lqr {

/// Everything the batch tool can be configured with. Missing keys keep their
/// defaults; unknown keys are rejected.
struct ExperimentConfig {
  ScenarioConfig scenario;
  std::vector<double> headings = default_heading_grid();  // rad
  double uncertainty_scale = 0.8;
  double uncertainty_heading = 3.141592653589793;
  MonteCarloConfig monte_carlo;
};

/// Throws kConfig with the offending key on malformed input.
ExperimentConfig parse_config(const std::string& json_text);
std::string to_json(const ExperimentConfig& cfg);
std::string scenario_to_json(const ScenarioConfig& cfg);

}  // namespace se23lqr
