#include <gtest/gtest.h>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <nlohmann/json.hpp>
#include <sstream>

#include "blab/config.hpp"
#include "blab/error.hpp"
#include "blab/lab.hpp"
#include "blab/scenarios.hpp"
#include "blab/sobolev.hpp"

using namespace blab;

namespace {

ErrorKind kind_of(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.kind();
  }
  ADD_FAILURE() << "no exception";
  return ErrorKind::IoError;
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::filesystem::path scratch(const std::string& name) {
  const auto dir = std::filesystem::temp_directory_path() / ("blab_test_lab_" + name);
  std::filesystem::remove_all(dir);
  return dir;
}

}  // namespace

TEST(RandomConductivity, RangeAndDeterminism) {
  const Grid g = Grid::make(128, 2.0);
  const double K = 2.0;
  const RandomConductivity a = random_conductivity(0.5, 1.0, K, 7, g);
  const RandomConductivity b = random_conductivity(0.5, 1.0, K, 7, g);
  const RandomConductivity c = random_conductivity(0.5, 1.0, K, 8, g);
  EXPECT_TRUE((a.gamma.values() == b.gamma.values()).all());
  EXPECT_FALSE((a.gamma.values() == c.gamma.values()).all());
  EXPECT_LE(a.gamma.values().real().maxCoeff(), K);
  EXPECT_GE(a.gamma.values().real().minCoeff(), 1.0 / K);
  EXPECT_EQ(a.gamma.values().imag().abs().maxCoeff(), 0.0);
  // equal to 1 outside the unit disk
  EXPECT_EQ(a.gamma(0, 0), cplx(1.0));
}

TEST(RandomConductivity, RemeasuredNormMatchesTarget) {
  const Grid g = Grid::make(256, 4.0);
  const double K = 2.0;
  const double gamma0 = 0.3 * ellipticity_bound(K);
  const RandomConductivity rc = random_conductivity(0.5, gamma0, K, 11, g);
  const double again = sobolev_norm(rc.gamma - ComplexField::constant(g, 1.0), 0.5).value;
  EXPECT_NEAR(again, rc.measured, 1e-12 * again);
  EXPECT_LE(std::abs(again - gamma0), 0.1 * gamma0);
  EXPECT_EQ(rc.clamped_fraction, 0.0);
}

TEST(RandomConductivity, IndependentOfGridSize) {
  const RandomConductivity a = random_conductivity(0.5, 0.5, 2.0, 3, Grid::make(128, 4.0));
  const RandomConductivity b = random_conductivity(0.5, 0.5, 2.0, 3, Grid::make(256, 4.0));
  double worst = 0.0;
  for (int j = 0; j < 128; ++j)
    for (int k = 0; k < 128; ++k) worst = std::max(worst, std::abs(a.gamma(j, k) - b.gamma(2 * j, 2 * k)));
  EXPECT_LT(worst, 1e-3);
}

TEST(RandomConductivity, Errors) {
  const Grid g = Grid::make(64, 2.0);
  EXPECT_EQ(kind_of([&] { random_conductivity(1.0, 1.0, 2.0, 1, g); }), ErrorKind::InvalidArgument);
  EXPECT_EQ(kind_of([&] { random_conductivity(0.5, -1.0, 2.0, 1, g); }), ErrorKind::InvalidArgument);
  EXPECT_EQ(kind_of([&] { random_conductivity(0.5, 1.0, 1.0, 1, g); }), ErrorKind::InvalidArgument);
  EXPECT_EQ(kind_of([&] { random_conductivity(0.5, 50.0, 1.2, 1, g); }), ErrorKind::TargetUnreachable);
}

TEST(Compose, IdentityIsExact) {
  const Grid g = Grid::make(64, 2.0);
  const ComplexField mu = ComplexField::sample(g, [](cplx z) { return std::exp(-4.0 * std::norm(z)) * cplx(1, 0.5); });
  const ComplexField out = compose_field(mu, ComplexField::coordinate(g));
  EXPECT_TRUE((out.values() == mu.values()).all());
}

TEST(Compose, GaussianUnderRadialStretch) {
  const Grid g = Grid::make(512, 4.0);
  const auto gauss = [](cplx z) { return cplx(std::exp(-4.0 * std::norm(z))); };
  const auto stretch = [](cplx z) { return std::abs(z) == 0.0 ? z : z * std::pow(std::abs(z), -0.5); };
  const ComplexField mu = ComplexField::sample(g, gauss);
  const ComplexField out = compose_field(mu, ComplexField::sample(g, stretch));
  double worst = 0.0;
  for (int j = 0; j < g.n(); ++j)
    for (int k = 0; k < g.n(); ++k) worst = std::max(worst, std::abs(out(j, k) - gauss(stretch(g.z(j, k)))));
  EXPECT_LE(worst, 1e-6);
}

TEST(Compose, LeavingTheBoxIsAnError) {
  const Grid g = Grid::make(64, 2.0);
  const ComplexField flat = ComplexField::constant(g, 0.1);
  const ComplexField bump = ComplexField::sample(g, [](cplx z) { return cplx(std::norm(z) < 1.0 ? 1.0 - std::norm(z) : 0.0); });
  const ComplexField wide = 3.0 * ComplexField::coordinate(g);
  EXPECT_EQ(kind_of([&] { compose_field(flat, wide); }), ErrorKind::OutOfDomain);
  EXPECT_NO_THROW(compose_field(bump, wide));
}

TEST(Spearman, Values) {
  EXPECT_DOUBLE_EQ(spearman({1, 2, 3, 4}, {10, 20, 30, 40}), 1.0);
  EXPECT_DOUBLE_EQ(spearman({1, 2, 3, 4}, {4, 3, 2, 1}), -1.0);
  EXPECT_NEAR(spearman({1, 2, 3, 4, 5}, {2, 1, 4, 3, 5}), 0.8, 1e-14);
  // ties get average ranks: ranks of y are 1.5, 1.5, 3
  EXPECT_NEAR(spearman({1, 2, 3}, {5, 5, 7}), 0.8660254037844386, 1e-14);
  EXPECT_EQ(kind_of([] { spearman({1}, {1}); }), ErrorKind::DimensionMismatch);
}

TEST(Config, ParsesValues) {
  ScenarioConfig c = default_config("decay");
  apply_config_text(c, "# header\nschema_version = blab-lab/1\n"
                       "scenario = decay\ngrid_n = 128  # smaller\nk_list = 1, 2+0.5i, -i\nseed = 5\n");
  EXPECT_EQ(c.grid_n, 128);
  EXPECT_EQ(c.seed, 5u);
  ASSERT_EQ(c.k_list.size(), 3u);
  EXPECT_EQ(c.k_list[1], cplx(2.0, 0.5));
  EXPECT_EQ(c.k_list[2], cplx(0.0, -1.0));
}

TEST(Config, Rejections) {
  const auto fails = [](const std::string& text) {
    ScenarioConfig c = default_config("decay");
    return kind_of([&] { apply_config_text(c, text); });
  };
  const std::string head = "schema_version = blab-lab/1\n";
  EXPECT_EQ(fails("grid_n = 128\n"), ErrorKind::ConfigError);
  EXPECT_EQ(fails("schema_version = blab-lab/2\n"), ErrorKind::ConfigError);
  EXPECT_EQ(fails(head + "colour = red\n"), ErrorKind::ConfigError);
  EXPECT_EQ(fails(head + "seed = 1\nseed = 2\n"), ErrorKind::ConfigError);
  EXPECT_EQ(fails(head + "grid_n = 100\n"), ErrorKind::ConfigError);
  EXPECT_EQ(fails(head + "alpha = 1.5\n"), ErrorKind::ConfigError);
  EXPECT_EQ(fails(head + "K = abc\n"), ErrorKind::ConfigError);
  EXPECT_EQ(fails(head + "lambda_list = 2\n"), ErrorKind::ConfigError);
  EXPECT_EQ(fails(head + "seed =\n"), ErrorKind::ConfigError);
  EXPECT_EQ(fails(head + "no equals sign\n"), ErrorKind::ConfigError);
}

TEST(Config, ComplexTokens) {
  EXPECT_EQ(parse_complex("2"), cplx(2.0));
  EXPECT_EQ(parse_complex("i"), cplx(0.0, 1.0));
  EXPECT_EQ(parse_complex("-i"), cplx(0.0, -1.0));
  EXPECT_EQ(parse_complex("0.5+2i"), cplx(0.5, 2.0));
  EXPECT_EQ(parse_complex("3-0.25i"), cplx(3.0, -0.25));
  EXPECT_EQ(parse_complex("1e-3+1e+2i"), cplx(1e-3, 1e2));
  EXPECT_THROW(parse_complex("2j"), Error);
}

TEST(Scenario, UnknownName) {
  ScenarioConfig c = default_config("nope");
  EXPECT_EQ(kind_of([&] { run_scenario(c); }), ErrorKind::UnknownScenario);
}

TEST(Scenario, RegistryListsEveryScenario) {
  std::vector<std::string> names;
  for (const auto& s : scenario_list()) names.push_back(s.name);
  for (const char* n : {"alessandrini", "oscillation", "decay", "stability_curve", "composition", "regularity",
                        "char_fn", "dbar_check", "linear_terms"})
    EXPECT_NE(std::find(names.begin(), names.end(), n), names.end()) << n;
}

TEST(Scenario, AlessandriniRowsAndSummary) {
  ScenarioConfig c = default_config("alessandrini");
  c.mesh_h = 0.02;
  c.out = scratch("alessandrini").string();
  const ScenarioResult r = run_scenario(c);
  ASSERT_TRUE(r.error.empty()) << r.error;
  EXPECT_TRUE(r.passed());
  write_outputs(r, c);
  const auto j = nlohmann::json::parse(slurp(std::filesystem::path(c.out) / "summary.json"));
  EXPECT_EQ(j["schema"], "blab-summary/1");
  EXPECT_EQ(j["scenario"], "alessandrini");
  EXPECT_EQ(j["passed"], true);
  EXPECT_EQ(j["config"]["mesh_h"], 0.02);
  EXPECT_FALSE(j["config"].contains("workers"));
  EXPECT_GE(j["assertions"].size(), 7u);
  const std::string csv = slurp(std::filesystem::path(c.out) / "alessandrini.csv");
  EXPECT_EQ(csv.substr(0, csv.find('\r')), "r0,rho,l2diff,rho_oracle,l2diff_grid");
}

TEST(Scenario, NumericFailureIsRecorded) {
  ScenarioConfig c = default_config("alessandrini");
  c.mesh_h = 0.05;  // thinner than four cells for r0 = 0.1
  const ScenarioResult r = run_scenario(c);
  EXPECT_FALSE(r.passed());
  EXPECT_NE(r.error.find("MeshTooCoarse"), std::string::npos) << r.error;
  EXPECT_FALSE(r.summary(c)["error"].is_null());
}

TEST(Scenario, ByteIdenticalAcrossWorkerCounts) {
  for (const char* name : {"alessandrini", "char_fn", "linear_terms"}) {
    std::vector<std::string> csv, summary;
    for (int w : {1, 3}) {
      ScenarioConfig c = default_config(name);
      c.grid_n = 128;
      c.mesh_h = 0.02;
      c.k_list = {1.0, 2.0};
      c.n_max = 2;
      c.workers = w;
      c.out = scratch(std::string(name) + std::to_string(w)).string();
      const ScenarioResult r = run_scenario(c);
      ASSERT_TRUE(r.error.empty()) << name << ": " << r.error;
      write_outputs(r, c);
      std::string all;
      for (const auto& [t, table] : r.tables) all += slurp(std::filesystem::path(c.out) / (t + ".csv"));
      for (const auto& [f, field] : r.fields) all += slurp(std::filesystem::path(c.out) / (f + ".blf"));
      csv.push_back(all);
      summary.push_back(slurp(std::filesystem::path(c.out) / "summary.json"));
    }
    EXPECT_EQ(csv[0], csv[1]) << name;
    EXPECT_EQ(summary[0], summary[1]) << name;
  }
}

TEST(Cli, ExitCodes) {
  const std::string cli = BLAB_CLI;
  const auto dir = scratch("cli");
  std::filesystem::create_directories(dir);
  const auto cfg = dir / "a.cfg";
  std::ofstream(cfg) << "schema_version = blab-lab/1\nscenario = alessandrini\nmesh_h = 0.02\n";
  const auto bad = dir / "b.cfg";
  std::ofstream(bad) << "schema_version = blab-lab/1\nbogus = 1\n";
  const auto code = [&](const std::string& args) {
    const int s = std::system((cli + " " + args + " > /dev/null 2>&1").c_str());
    return WIFEXITED(s) ? WEXITSTATUS(s) : -1;
  };
  const std::string out = " --out " + (dir / "out").string();
  EXPECT_EQ(code("list"), 0);
  EXPECT_EQ(code("run alessandrini --config " + cfg.string() + out), 0);
  EXPECT_TRUE(std::filesystem::exists(dir / "out" / "summary.json"));
  EXPECT_EQ(code("run nope --config " + cfg.string() + out), 2);
  EXPECT_EQ(code("run alessandrini --config " + bad.string() + out), 2);
  EXPECT_EQ(code("run char_fn --config " + cfg.string() + out), 2);
  EXPECT_EQ(code("run alessandrini" + out), 2);
  EXPECT_EQ(code("frobnicate"), 2);
  EXPECT_EQ(code("run alessandrini --config " + cfg.string() + out + " --grid-n 100"), 2);
  EXPECT_EQ(code("run alessandrini --config " + cfg.string() + out + " --workers 2 --seed 3"), 0);
}
