#pragma once

#include <cstdint>
#include <nlohmann/json.hpp>
#include <string>
#include <vector>

#include "blab/grid.hpp"

namespace blab {

inline constexpr const char* kConfigSchema = "blab-lab/1";

struct ScenarioConfig {
  std::string scenario;
  int grid_n = 256;
  double half_width = 4.0;
  double K = 2.0;
  double alpha = 0.5;
  double gamma0 = 1.0;
  std::vector<cplx> k_list = {2.0, 4.0, 8.0, 16.0, 32.0};
  std::vector<cplx> lambda_list = {1.0, {0.0, 1.0}, -1.0, {0.0, -1.0}};
  std::uint64_t seed = 20240613;
  double mesh_h = 0.01;
  int n_b = 16;
  int workers = 1;
  std::string out = "out";
  double tol = 1e-8;
  int max_outer = 200;
  std::vector<double> r0_list = {0.1, 0.2, 0.3};
  std::vector<double> osc_j = {1, 2, 4, 8};
  double osc_amplitude = 0.5;
  int pairs = 10;
  double contrast_min = 5e-4;
  std::vector<double> delta_k_list = {4e-2, 2e-2, 1e-2};
  int n_max = 4;
  std::vector<double> beta_factors = {0.5, 0.9};
  std::vector<double> char_orders = {0.45, 0.55};
  std::vector<double> kappa_list = {0.2, 1.0 / 3.0};
  double mu_amplitude = 0.3;

  /// Everything that determines the numbers (worker count and output directory excluded).
  nlohmann::ordered_json to_json() const;
};

/// Defaults tuned per scenario; unknown names keep the generic defaults.
ScenarioConfig default_config(const std::string& scenario);

/// Flat `key = value` lines, `#` comments.  The first setting must be
/// `schema_version = blab-lab/1`; unknown or repeated keys and out-of-range
/// values throw ConfigError.
void apply_config_text(ScenarioConfig& cfg, const std::string& text);
void apply_config_file(ScenarioConfig& cfg, const std::string& path);

/// Range checks shared by file and command-line settings.
void validate(const ScenarioConfig& cfg);

/// "2", "-1.5", "i", "-i", "0.5+2i", "3-0.25i".
cplx parse_complex(const std::string& token);

}  // namespace blab
