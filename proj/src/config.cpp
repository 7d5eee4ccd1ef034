#include "blab/config.hpp"

#include <cmath>
#include <fstream>
#include <functional>
#include <map>
#include <set>
#include <sstream>

#include "blab/error.hpp"

namespace blab {
namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

[[noreturn]] void bad(const std::string& key, const std::string& why) {
  throw Error(ErrorKind::ConfigError, key + ": " + why);
}

double to_double(const std::string& key, const std::string& v) {
  try {
    std::size_t used = 0;
    const double d = std::stod(v, &used);
    if (used != v.size() || !std::isfinite(d)) bad(key, "not a number: '" + v + "'");
    return d;
  } catch (const std::logic_error&) {
    bad(key, "not a number: '" + v + "'");
  }
}

long long to_integer(const std::string& key, const std::string& v) {
  try {
    std::size_t used = 0;
    const long long i = std::stoll(v, &used);
    if (used != v.size()) bad(key, "not an integer: '" + v + "'");
    return i;
  } catch (const std::logic_error&) {
    bad(key, "not an integer: '" + v + "'");
  }
}

std::vector<std::string> split(const std::string& v) {
  std::vector<std::string> out;
  std::stringstream ss(v);
  for (std::string item; std::getline(ss, item, ',');) {
    item = trim(item);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

std::vector<double> to_list(const std::string& key, const std::string& v) {
  std::vector<double> out;
  for (const auto& t : split(v)) out.push_back(to_double(key, t));
  if (out.empty()) bad(key, "empty list");
  return out;
}

std::vector<cplx> to_complex_list(const std::string& key, const std::string& v) {
  std::vector<cplx> out;
  for (const auto& t : split(v)) {
    try {
      out.push_back(parse_complex(t));
    } catch (const Error&) {
      bad(key, "not a complex number: '" + t + "'");
    }
  }
  if (out.empty()) bad(key, "empty list");
  return out;
}

using Setter = std::function<void(ScenarioConfig&, const std::string&, const std::string&)>;

const std::map<std::string, Setter>& setters() {
  static const std::map<std::string, Setter> table = {
      {"scenario", [](ScenarioConfig& c, const std::string&, const std::string& v) { c.scenario = v; }},
      {"grid_n", [](ScenarioConfig& c, const std::string& k, const std::string& v) { c.grid_n = static_cast<int>(to_integer(k, v)); }},
      {"half_width", [](ScenarioConfig& c, const std::string& k, const std::string& v) { c.half_width = to_double(k, v); }},
      {"K", [](ScenarioConfig& c, const std::string& k, const std::string& v) { c.K = to_double(k, v); }},
      {"alpha", [](ScenarioConfig& c, const std::string& k, const std::string& v) { c.alpha = to_double(k, v); }},
      {"gamma0", [](ScenarioConfig& c, const std::string& k, const std::string& v) { c.gamma0 = to_double(k, v); }},
      {"k_list", [](ScenarioConfig& c, const std::string& k, const std::string& v) { c.k_list = to_complex_list(k, v); }},
      {"lambda_list", [](ScenarioConfig& c, const std::string& k, const std::string& v) { c.lambda_list = to_complex_list(k, v); }},
      {"seed", [](ScenarioConfig& c, const std::string& k, const std::string& v) {
         const long long s = to_integer(k, v);
         if (s < 0) bad(k, "must be >= 0");
         c.seed = static_cast<std::uint64_t>(s);
       }},
      {"mesh_h", [](ScenarioConfig& c, const std::string& k, const std::string& v) { c.mesh_h = to_double(k, v); }},
      {"n_b", [](ScenarioConfig& c, const std::string& k, const std::string& v) { c.n_b = static_cast<int>(to_integer(k, v)); }},
      {"workers", [](ScenarioConfig& c, const std::string& k, const std::string& v) { c.workers = static_cast<int>(to_integer(k, v)); }},
      {"out", [](ScenarioConfig& c, const std::string&, const std::string& v) { c.out = v; }},
      {"tol", [](ScenarioConfig& c, const std::string& k, const std::string& v) { c.tol = to_double(k, v); }},
      {"max_outer", [](ScenarioConfig& c, const std::string& k, const std::string& v) { c.max_outer = static_cast<int>(to_integer(k, v)); }},
      {"r0_list", [](ScenarioConfig& c, const std::string& k, const std::string& v) { c.r0_list = to_list(k, v); }},
      {"osc_j", [](ScenarioConfig& c, const std::string& k, const std::string& v) { c.osc_j = to_list(k, v); }},
      {"osc_amplitude", [](ScenarioConfig& c, const std::string& k, const std::string& v) { c.osc_amplitude = to_double(k, v); }},
      {"pairs", [](ScenarioConfig& c, const std::string& k, const std::string& v) { c.pairs = static_cast<int>(to_integer(k, v)); }},
      {"contrast_min", [](ScenarioConfig& c, const std::string& k, const std::string& v) { c.contrast_min = to_double(k, v); }},
      {"delta_k_list", [](ScenarioConfig& c, const std::string& k, const std::string& v) { c.delta_k_list = to_list(k, v); }},
      {"n_max", [](ScenarioConfig& c, const std::string& k, const std::string& v) { c.n_max = static_cast<int>(to_integer(k, v)); }},
      {"beta_factors", [](ScenarioConfig& c, const std::string& k, const std::string& v) { c.beta_factors = to_list(k, v); }},
      {"char_orders", [](ScenarioConfig& c, const std::string& k, const std::string& v) { c.char_orders = to_list(k, v); }},
      {"kappa_list", [](ScenarioConfig& c, const std::string& k, const std::string& v) { c.kappa_list = to_list(k, v); }},
      {"mu_amplitude", [](ScenarioConfig& c, const std::string& k, const std::string& v) { c.mu_amplitude = to_double(k, v); }},
  };
  return table;
}

void require(bool ok, const std::string& key, const std::string& why) {
  if (!ok) bad(key, why);
}

nlohmann::ordered_json complex_list_json(const std::vector<cplx>& v) {
  nlohmann::ordered_json a = nlohmann::ordered_json::array();
  for (cplx z : v) a.push_back({z.real(), z.imag()});
  return a;
}

}  // namespace

cplx parse_complex(const std::string& token) {
  const std::string t = trim(token);
  const auto fail = [&] { throw Error(ErrorKind::ConfigError, "not a complex number: '" + token + "'"); };
  if (t.empty()) fail();
  if (t.back() != 'i') {
    std::size_t used = 0;
    double re = 0;
    try {
      re = std::stod(t, &used);
    } catch (const std::logic_error&) {
      fail();
    }
    if (used != t.size()) fail();
    return re;
  }
  const std::string body = t.substr(0, t.size() - 1);
  // split at the last sign that is not an exponent sign and not the leading sign
  std::size_t cut = std::string::npos;
  for (std::size_t i = body.size(); i-- > 1;)
    if ((body[i] == '+' || body[i] == '-') && body[i - 1] != 'e' && body[i - 1] != 'E') {
      cut = i;
      break;
    }
  const auto coef = [&](const std::string& s) -> double {
    if (s.empty() || s == "+") return 1.0;
    if (s == "-") return -1.0;
    std::size_t used = 0;
    double v = 0;
    try {
      v = std::stod(s, &used);
    } catch (const std::logic_error&) {
      fail();
    }
    if (used != s.size()) fail();
    return v;
  };
  if (cut == std::string::npos) return {0.0, coef(body)};
  const std::string re_part = body.substr(0, cut), im_part = body.substr(cut);
  std::size_t used = 0;
  double re = 0;
  try {
    re = std::stod(re_part, &used);
  } catch (const std::logic_error&) {
    fail();
  }
  if (used != re_part.size()) fail();
  return {re, coef(im_part)};
}

nlohmann::ordered_json ScenarioConfig::to_json() const {
  return {{"schema_version", kConfigSchema},
          {"scenario", scenario},
          {"grid_n", grid_n},
          {"half_width", half_width},
          {"K", K},
          {"alpha", alpha},
          {"gamma0", gamma0},
          {"k_list", complex_list_json(k_list)},
          {"lambda_list", complex_list_json(lambda_list)},
          {"seed", seed},
          {"mesh_h", mesh_h},
          {"n_b", n_b},
          {"tol", tol},
          {"max_outer", max_outer},
          {"r0_list", r0_list},
          {"osc_j", osc_j},
          {"osc_amplitude", osc_amplitude},
          {"pairs", pairs},
          {"contrast_min", contrast_min},
          {"delta_k_list", delta_k_list},
          {"n_max", n_max},
          {"beta_factors", beta_factors},
          {"char_orders", char_orders},
          {"kappa_list", kappa_list},
          {"mu_amplitude", mu_amplitude}};
}

ScenarioConfig default_config(const std::string& scenario) {
  ScenarioConfig c;
  c.scenario = scenario;
  if (scenario == "oscillation") {
    c.n_b = 4;
  } else if (scenario == "composition") {
    c.alpha = 0.6;
  } else if (scenario == "dbar_check") {
    c.grid_n = 512;
    c.k_list = {2.0};
    c.tol = 1e-11;
    c.delta_k_list = {0.16, 0.08, 0.04, 0.02, 0.01};
  } else if (scenario == "linear_terms") {
    c.grid_n = 512;
    c.k_list = {2.0, 4.0, 8.0};
  } else if (scenario == "regularity") {
    c.k_list = {1.0, 2.0, 4.0};
  } else if (scenario == "convergence_map") {
    c.k_list = {4.0, 16.0, 32.0};
  }
  return c;
}

void validate(const ScenarioConfig& c) {
  require(c.grid_n >= 64 && c.grid_n <= 2048 && (c.grid_n & (c.grid_n - 1)) == 0, "grid_n",
          "must be a power of two in [64, 2048]");
  require(c.half_width >= 2.0 && c.half_width <= 64.0, "half_width", "must lie in [2, 64]");
  require(c.K > 1.0 && c.K <= 100.0, "K", "must lie in (1, 100]");
  require(c.alpha > 0.0 && c.alpha < 1.0, "alpha", "must lie in (0, 1)");
  require(c.gamma0 > 0.0, "gamma0", "must be positive");
  for (cplx l : c.lambda_list) require(std::abs(std::abs(l) - 1.0) < 1e-12, "lambda_list", "entries must be unimodular");
  require(c.mesh_h > 0.0 && c.mesh_h <= 0.25, "mesh_h", "must lie in (0, 0.25]");
  require(c.n_b >= 1 && c.n_b <= 64, "n_b", "must lie in [1, 64]");
  require(c.workers >= 1 && c.workers <= 256, "workers", "must lie in [1, 256]");
  require(!c.out.empty(), "out", "must not be empty");
  require(c.tol > 0.0 && c.tol < 1.0, "tol", "must lie in (0, 1)");
  require(c.max_outer >= 1, "max_outer", "must be >= 1");
  for (double r : c.r0_list) require(r > 0.0 && r < 1.0, "r0_list", "radii must lie in (0, 1)");
  for (double j : c.osc_j) require(j >= 1.0, "osc_j", "factors must be >= 1");
  require(c.osc_amplitude > 0.0 && c.osc_amplitude < 1.0, "osc_amplitude", "must lie in (0, 1)");
  require(c.pairs >= 2, "pairs", "must be >= 2");
  require(c.contrast_min > 0.0 && c.contrast_min < 1.0, "contrast_min", "must lie in (0, 1)");
  for (double d : c.delta_k_list) require(d > 0.0, "delta_k_list", "steps must be positive");
  require(c.n_max >= 0 && c.n_max <= 32, "n_max", "must lie in [0, 32]");
  for (double b : c.beta_factors) require(b > 0.0, "beta_factors", "must be positive");
  for (double a : c.char_orders) require(a > 0.0 && a < 1.0, "char_orders", "must lie in (0, 1)");
  for (double k : c.kappa_list) require(k > 0.0 && k < 1.0, "kappa_list", "must lie in (0, 1)");
  require(c.mu_amplitude > 0.0 && c.mu_amplitude < 1.0, "mu_amplitude", "must lie in (0, 1)");
}

void apply_config_text(ScenarioConfig& cfg, const std::string& text) {
  std::istringstream in(text);
  std::set<std::string> seen;
  bool schema_ok = false;
  int lineno = 0;
  for (std::string line; std::getline(in, line);) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw Error(ErrorKind::ConfigError, "line " + std::to_string(lineno) + ": expected key = value");
    const std::string key = trim(line.substr(0, eq)), value = trim(line.substr(eq + 1));
    if (!seen.insert(key).second) bad(key, "set twice");
    if (key == "schema_version") {
      if (value != kConfigSchema) bad(key, "expected " + std::string(kConfigSchema) + ", got '" + value + "'");
      schema_ok = true;
      continue;
    }
    if (!schema_ok) bad(key, "schema_version must come first");
    const auto it = setters().find(key);
    if (it == setters().end()) bad(key, "unknown key");
    if (value.empty()) bad(key, "empty value");
    it->second(cfg, key, value);
  }
  if (!schema_ok) throw Error(ErrorKind::ConfigError, "missing schema_version");
  validate(cfg);
}

void apply_config_file(ScenarioConfig& cfg, const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::ConfigError, "cannot read config " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  apply_config_text(cfg, ss.str());
}

}  // namespace blab
