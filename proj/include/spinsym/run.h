#pragma once

#include <array>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "spinsym/model.h"
#include "spinsym/numlab.h"

namespace spinsym {

inline constexpr const char* kRunSchema = "spinsym.run/1";

/// Numeric conservation run: a potential, numeric values for its symbols,
/// a grid, an initial packet and the operators to track.
///
/// JSON layout:
///   { "schema": "spinsym.run/1", "variant": "sp", "potential": {...},
///     "values": {"g": 1, ...}, "functions": {"R": {"arity": 1, "body": "u1^2"}},
///     "grid": {"n": 48, "lo": -8, "hi": 8}, "packet": ["up", "down"],
///     "dt": 0.005, "steps": 200, "accuracy": 4, "boundary": "dirichlet",
///     "record_every": 1, "track": {"J3": "J3", "L3": "L3"} }
struct RunConfig {
  Variant variant = Variant::SP;
  PotentialConfig potential;
  NumericEnv env;
  Grid grid;
  std::array<std::string, 2> packet{"exp(-r^2/2)", "0"};
  EvolutionSpec spec;
  std::vector<std::pair<std::string, std::string>> track;

  static RunConfig from_json(const nlohmann::json& j);
  static RunConfig load(const std::string& path);
};

struct RunResult {
  Trajectory trajectory;
  std::vector<DriftReport> drift;
  double seconds = 0;
  /// Timing is left out.
  nlohmann::json to_json() const;
};

RunResult run_conservation(const RunConfig& cfg);

}  // namespace spinsym
