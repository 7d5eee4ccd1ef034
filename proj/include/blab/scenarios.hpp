#pragma once

#include <nlohmann/json.hpp>
#include <string>
#include <utility>
#include <vector>

#include "blab/config.hpp"
#include "blab/csv.hpp"
#include "blab/field.hpp"

namespace blab {

/// Kinds: "bound" (an explicit inequality from the theory), "exact" (a closed-form
/// value), "property" (a grid or perturbation behaviour standing in for an
/// unquantified constant), "monotonicity", "sign", "finiteness".
struct Assertion {
  std::string id;
  std::string kind;
  bool passed = false;
  double value = 0.0;
  double bound = 0.0;
  std::string detail;
};

struct ScenarioResult {
  std::string scenario;
  std::vector<Assertion> assertions;
  std::vector<std::pair<std::string, CsvTable>> tables;
  std::vector<std::pair<std::string, ComplexField>> fields;
  nlohmann::ordered_json metrics = nlohmann::ordered_json::object();
  /// Numeric failure that stopped the scenario, empty otherwise.
  std::string error;

  bool passed() const;
  nlohmann::ordered_json summary(const ScenarioConfig& cfg) const;
};

struct ScenarioInfo {
  std::string name;
  std::string description;
};

const std::vector<ScenarioInfo>& scenario_list();

/// Runs the scenario without touching the file system.  Numeric failures are caught
/// and recorded in `error`; UnknownScenario and ConfigError propagate.
ScenarioResult run_scenario(const ScenarioConfig& cfg);

/// Writes <out>/<table>.csv, <out>/<field>.blf and <out>/summary.json.
void write_outputs(const ScenarioResult& r, const ScenarioConfig& cfg);

}  // namespace blab
