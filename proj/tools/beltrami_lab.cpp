#include <CLI11.hpp>
#include <cstdio>
#include <iostream>
#include <optional>

#include "blab/config.hpp"
#include "blab/error.hpp"
#include "blab/scenarios.hpp"

namespace {

constexpr int kPass = 0;
constexpr int kFail = 1;
constexpr int kUsage = 2;

int run(const std::string& scenario, const std::string& config, const std::string& out,
        std::optional<int> grid_n, std::optional<std::uint64_t> seed, std::optional<int> workers) {
  blab::ScenarioConfig cfg = blab::default_config(scenario);
  cfg.scenario = scenario;
  blab::apply_config_file(cfg, config);
  if (cfg.scenario != scenario)
    throw blab::Error(blab::ErrorKind::ConfigError,
                      "config is for scenario '" + cfg.scenario + "', not '" + scenario + "'");
  cfg.out = out;
  if (grid_n) cfg.grid_n = *grid_n;
  if (seed) cfg.seed = *seed;
  if (workers) cfg.workers = *workers;
  blab::validate(cfg);

  const blab::ScenarioResult r = blab::run_scenario(cfg);
  blab::write_outputs(r, cfg);
  for (const auto& a : r.assertions)
    std::printf("%s %s value=%.6g bound=%.6g\n", a.passed ? "PASS" : "FAIL", a.id.c_str(), a.value, a.bound);
  if (!r.error.empty()) std::printf("ERROR %s\n", r.error.c_str());
  std::printf("%s: %s (%s/summary.json)\n", scenario.c_str(), r.passed() ? "passed" : "failed", out.c_str());
  return r.passed() ? kPass : kFail;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Numerical experiments for planar conductivity stability"};
  app.require_subcommand(1);

  app.add_subcommand("list", "list the registered scenarios");

  auto* run_cmd = app.add_subcommand("run", "run one scenario");
  std::string scenario, config, out;
  std::optional<int> grid_n, workers;
  std::optional<std::uint64_t> seed;
  run_cmd->add_option("scenario", scenario, "scenario name")->required();
  run_cmd->add_option("--config", config, "configuration file")->required();
  run_cmd->add_option("--out", out, "output directory")->required();
  run_cmd->add_option("--grid-n", grid_n, "grid size N (overrides the config)");
  run_cmd->add_option("--seed", seed, "random seed (overrides the config)");
  run_cmd->add_option("--workers", workers, "worker threads (overrides the config)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kPass : kUsage;
  }

  if (app.got_subcommand("list")) {
    for (const auto& s : blab::scenario_list()) std::cout << s.name << "\t" << s.description << "\n";
    return kPass;
  }
  try {
    return run(scenario, config, out, grid_n, seed, workers);
  } catch (const blab::Error& e) {
    std::cerr << "beltrami-lab: " << e.what() << "\n";
    const auto k = e.kind();
    return k == blab::ErrorKind::ConfigError || k == blab::ErrorKind::UnknownScenario ? kUsage : kFail;
  } catch (const std::exception& e) {
    std::cerr << "beltrami-lab: " << e.what() << "\n";
    return kFail;
  }
}
