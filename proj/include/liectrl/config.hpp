#pragma once

#include <string>

#include <json.hpp>

#include "liectrl/grid.hpp"

namespace liectrl {

/// Grid and integrator parameters, set per system in the config file.
struct SimParams {
  Mat box;                 // d x 2 axis bounds
  std::vector<int> cells;  // cells per axis
  double horizon = 8.0;
  double dwell = 0.1;
  double dt = 1e-2;            // grid integration step
  double trajectory_dt = 1e-3; // trajectory integration step
  int threads = 1;
};

/// Optional parameters for the set-identity verification passes. Horizons are
/// chosen per system so the compared sets stay inside the box.
struct CheckParams {
  std::optional<double> duality_horizon;
  std::optional<double> semigroup_tau1;
  std::optional<double> semigroup_tau2;
  std::optional<std::vector<int>> semigroup_cells;
};

struct SystemConfig {
  std::string name;
  LinearSystemSpec system;
  SimParams sim;
  CheckParams checks;
};

/// Parses and validates a system description; throws InputError on problems.
SystemConfig parse_system_config(const nlohmann::json& j);

/// Reads a config file from disk.
SystemConfig load_system_config(const std::string& path);

}  // namespace liectrl
