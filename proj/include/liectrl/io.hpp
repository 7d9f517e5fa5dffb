#pragma once

#include <string>

#include <json.hpp>

#include "liectrl/analysis.hpp"
#include "liectrl/grid.hpp"
#include "liectrl/spectral.hpp"

namespace liectrl {

nlohmann::json validation_to_json(const ValidationReport& v);
nlohmann::json spectral_to_json(const SpectralDecomposition& dec);
nlohmann::json grading_to_json(const GradingReport& g);
nlohmann::json classification_to_json(const ClassificationReport& r);
nlohmann::json identities_to_json(const IdentityReport& r);
std::string classification_to_text(const ClassificationReport& r);

nlohmann::json duality_to_json(const DualityMetrics& m);
nlohmann::json grid_summary_json(const OccupancyGrid& g);
nlohmann::json controlset_to_json(const ControlSetResult& r);

/// Theory-vs-numerics comparison for decided verdicts; one line per check.
struct CrossCheck {
  std::vector<std::string> lines;
  bool all_agree = true;
};

CrossCheck cross_check_reach(const ClassificationReport& report, const OccupancyGrid& reach);
CrossCheck cross_check_controlset(const ClassificationReport& report,
                                  const ControlSetResult& result);

/// Header lines, then one lexicographically sorted row of cell indices per
/// occupied cell. Stable across runs for identical inputs.
std::string grid_to_csv(const OccupancyGrid& g);

std::string trajectory_to_csv(const Trajectory& t);

}  // namespace liectrl
