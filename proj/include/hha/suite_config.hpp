#pragma once
// Suite configuration: JSON schema, per-suite defaults and tolerance tables.

#include <cstdint>
#include <fstream>
#include <map>
#include <nlohmann/json.hpp>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "hha/error.hpp"
#include "hha/exponent.hpp"
#include "hha/field.hpp"

namespace hha {

/// Invalid or inconsistent configuration (CLI exit code 2).
struct ConfigError : DomainError {
  using DomainError::DomainError;
};

inline const std::vector<std::string>& suite_names() {
  static const std::vector<std::string> names = {"algebra", "measure",  "luxemburg", "ballnorms",
                                                 "maximal", "atoms",    "riesz",     "hardy"};
  return names;
}

inline bool is_suite(const std::string& s) {
  const auto& n = suite_names();
  return std::find(n.begin(), n.end(), s) != n.end();
}

/// Tolerance keys a suite accepts, with their defaults.
inline const std::map<std::string, double>& suite_tolerances(const std::string& suite) {
  static const std::map<std::string, std::map<std::string, double>> table = {
      {"algebra",
       {{"group", 1e-12}, {"gauge", 1e-12}, {"dilation", 1e-12}, {"vector_fields", 1e-8}}},
      {"measure", {{"unit_ball", 0.01}, {"scaling", 0.02}, {"invariance", 0.02}}},
      {"luxemburg",
       {{"closed_form", 1e-6}, {"homogeneity", 1e-8}, {"power", 1e-8}, {"holder", 0.0}, {"dual_lower", 0.5},
        {"dual_upper", 2.0}, {"quasi_triangle", 0.0}}},
      {"ballnorms", {{"spread", 10.0}, {"constant", 1e-6}, {"overlap_spread", 10.0}}},
      {"maximal", {{"slope", 0.2}}},
      {"atoms", {{"moment", 1e-10}, {"size", 1e-8}, {"resample", 1e-6}, {"spread", 10.0}, {"embedding", 1e-9}}},
      {"riesz",
       {{"ball_integral_2", 0.02}, {"ball_integral_1", 0.05}, {"kernel_change", 0.1}, {"spread", 10.0},
        {"slope", 0.2}, {"decay", 0.3}, {"moment", 1e-8}, {"size", 1e-8}}},
      {"hardy", {{"spread", 10.0}}},
  };
  auto it = table.find(suite);
  if (it == table.end()) throw ConfigError("unknown suite '" + suite + "'");
  return it->second;
}

struct SuiteConfig {
  std::string suite;
  /// Main grid of the suite at unit scale.
  GridSpec grid;
  std::vector<ExponentFn> exponents;
  std::vector<double> alphas;
  std::vector<int> Ns;
  double beta_margin = 2.0;
  std::vector<std::uint64_t> seeds;
  /// Ball radii and gauge distances of the ball centers from e.
  std::vector<double> deltas;
  std::vector<double> centers;
  /// Atom exponent p0; empty means (max(1, p_+) + Q/alpha) / 2.
  std::optional<double> p0;
  int samples = 0;
  int families = 0;
  int balls = 0;
  std::map<std::string, double> tolerances;
  std::optional<std::string> output_path;
  std::optional<std::string> output_format;
  bool timing = false;

  double tol(const std::string& key) const {
    auto it = tolerances.find(key);
    if (it != tolerances.end()) return it->second;
    const auto& d = suite_tolerances(suite);
    auto jt = d.find(key);
    if (jt == d.end()) throw DomainError("suite " + suite + " has no tolerance '" + key + "'");
    return jt->second;
  }
};

inline std::vector<ExponentFn> default_exponents() {
  return {ExponentFn::make_constant(2.0), ExponentFn::make_log_decay(2.0, 0.5),
          ExponentFn::make_gaussian_bump(1.5, 0.5, 1.0), ExponentFn::make_gaussian_bump(0.9, 0.3, 1.0)};
}

/// Defaults of every field for `suite`.
inline SuiteConfig default_config(const std::string& suite) {
  if (!is_suite(suite)) throw ConfigError("unknown suite '" + suite + "'");
  SuiteConfig c;
  c.suite = suite;
  c.exponents = default_exponents();
  c.alphas = {1.0, 2.0};
  c.Ns = {1, 2};
  c.seeds = {1, 2, 3, 4, 5};
  c.deltas = {0.25, 0.5, 1.0};
  c.centers = {0.0, 1.0, 2.0};
  c.grid = GridSpec{4.0, 4.0, 1.0 / 16, 1.0 / 16};
  if (suite == "algebra") {
    c.samples = 100000;
    c.seeds = {2024};
  } else if (suite == "measure") {
    c.grid = GridSpec{1.125, 0.375, 1.0 / 64, 1.0 / 64};
    c.deltas = {0.5, 1.0, 2.0};
  } else if (suite == "luxemburg") {
    c.grid = GridSpec{1.25, 0.5, 1.0 / 8, 1.0 / 16};
    c.samples = 200;
    c.seeds = {7};
  } else if (suite == "ballnorms") {
    c.balls = 30;
    c.families = 20;
    c.seeds = {11};
    c.grid = GridSpec{3.0, 2.0, 1.0 / 8, 1.0 / 16};
  } else if (suite == "maximal") {
    c.alphas = {0.0, 1.0, 2.0};
    c.deltas = {0.5, 1.0, 2.0, 4.0};
    c.grid = GridSpec{3.0, 2.0, 1.0 / 8, 1.0 / 16};
    c.exponents = {ExponentFn::make_constant(2.0), ExponentFn::make_log_decay(2.0, 0.5),
                   ExponentFn::make_gaussian_bump(1.5, 0.5, 1.0), ExponentFn::make_gaussian_bump(1.2, 0.4, 1.0)};
  } else if (suite == "atoms") {
    c.Ns = {1, 2, 3};
    c.families = 20;
    c.grid = GridSpec{3.0, 2.0, 1.0 / 8, 1.0 / 16};
  } else if (suite == "riesz") {
    c.grid = GridSpec{2.0, 1.0, 1.0 / 8, 1.0 / 16};
  } else if (suite == "hardy") {
    c.grid = GridSpec{2.0, 1.0, 1.0 / 4, 1.0 / 16};
  }
  return c;
}

namespace detail {

template <class T>
std::vector<T> scalar_or_list(const nlohmann::json& j, const std::string& key) {
  if (j.is_array()) {
    if (j.empty()) throw ConfigError("'" + key + "' must not be empty");
    return j.get<std::vector<T>>();
  }
  return {j.get<T>()};
}

}  // namespace detail

/// Parses a config object; missing fields take the suite defaults. `suite_hint`
/// (from the command line) wins over a missing "suite" key and must agree with
/// a present one.
inline SuiteConfig parse_config(const nlohmann::json& j, const std::string& suite_hint = {}) {
  if (!j.is_object()) throw ConfigError("config must be a JSON object");
  static const std::set<std::string> keys = {"suite",   "grid",     "exponents", "alpha",      "N",
                                             "beta_margin", "seeds", "deltas",  "centers",    "p0",
                                             "samples", "families", "balls",     "tolerances", "output",
                                             "timing"};
  for (const auto& [k, v] : j.items())
    if (!keys.count(k)) throw ConfigError("unknown config key '" + k + "'");

  std::string suite = suite_hint;
  if (j.contains("suite")) {
    const auto s = j.at("suite").get<std::string>();
    if (!suite.empty() && s != suite) throw ConfigError("config is for suite '" + s + "', not '" + suite + "'");
    suite = s;
  }
  if (suite.empty()) throw ConfigError("no suite given");
  SuiteConfig c = default_config(suite);

  try {
    if (j.contains("grid")) {
      const auto& g = j.at("grid");
      for (const auto& [k, v] : g.items())
        if (k != "Lx" && k != "Lt" && k != "hx" && k != "ht") throw ConfigError("unknown grid key '" + k + "'");
      c.grid.Lx = g.value("Lx", c.grid.Lx);
      c.grid.Lt = g.value("Lt", c.grid.Lt);
      c.grid.hx = g.value("hx", c.grid.hx);
      c.grid.ht = g.value("ht", c.grid.ht);
      c.grid.validate();
    }
    if (j.contains("exponents")) {
      c.exponents.clear();
      for (const auto& e : j.at("exponents")) c.exponents.push_back(ExponentFn::from_json(e));
      if (c.exponents.empty()) throw ConfigError("'exponents' must not be empty");
    }
    if (j.contains("alpha")) c.alphas = detail::scalar_or_list<double>(j.at("alpha"), "alpha");
    if (j.contains("N")) c.Ns = detail::scalar_or_list<int>(j.at("N"), "N");
    if (j.contains("beta_margin")) c.beta_margin = j.at("beta_margin").get<double>();
    if (j.contains("seeds")) c.seeds = detail::scalar_or_list<std::uint64_t>(j.at("seeds"), "seeds");
    if (j.contains("deltas")) c.deltas = detail::scalar_or_list<double>(j.at("deltas"), "deltas");
    if (j.contains("centers")) c.centers = detail::scalar_or_list<double>(j.at("centers"), "centers");
    if (j.contains("p0")) {
      const auto& p = j.at("p0");
      if (p.is_string()) {
        if (p.get<std::string>() != "auto") throw ConfigError("p0 must be a number or \"auto\"");
        c.p0.reset();
      } else {
        c.p0 = p.get<double>();
      }
    }
    if (j.contains("samples")) c.samples = j.at("samples").get<int>();
    if (j.contains("families")) c.families = j.at("families").get<int>();
    if (j.contains("balls")) c.balls = j.at("balls").get<int>();
    if (j.contains("tolerances")) {
      const auto& known = suite_tolerances(suite);
      for (const auto& [k, v] : j.at("tolerances").items()) {
        if (!known.count(k)) throw ConfigError("suite " + suite + " has no tolerance '" + k + "'");
        c.tolerances[k] = v.get<double>();
      }
    }
    if (j.contains("output")) {
      const auto& o = j.at("output");
      for (const auto& [k, v] : o.items())
        if (k != "path" && k != "format") throw ConfigError("unknown output key '" + k + "'");
      if (o.contains("path")) c.output_path = o.at("path").get<std::string>();
      if (o.contains("format")) c.output_format = o.at("format").get<std::string>();
    }
    if (j.contains("timing")) c.timing = j.at("timing").get<bool>();
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("malformed config: ") + e.what());
  } catch (const ConfigError&) {
    throw;
  } catch (const DomainError& e) {
    throw ConfigError(e.what());
  }

  if (!(c.beta_margin >= 1.0)) throw ConfigError("beta_margin must be >= 1");
  if (c.seeds.empty()) throw ConfigError("'seeds' must not be empty");
  for (double a : c.alphas)
    if (!(a >= 0.0 && a < 4.0)) throw ConfigError("alpha must lie in [0, Q)");
  for (int n : c.Ns)
    if (n < 1) throw ConfigError("N must be >= 1");
  for (double d : c.deltas)
    if (!(d > 0.0)) throw ConfigError("deltas must be positive");
  for (double r : c.centers)
    if (!(r >= 0.0)) throw ConfigError("centers must be nonnegative gauge distances");
  if (c.p0 && !(*c.p0 > 1.0)) throw ConfigError("p0 must exceed 1");
  if (c.samples < 0 || c.families < 0 || c.balls < 0) throw ConfigError("counts must be nonnegative");
  for (const auto& [k, v] : c.tolerances)
    if (!(v >= 0.0)) throw ConfigError("tolerance '" + k + "' must be nonnegative");
  return c;
}

inline SuiteConfig load_config(const std::string& path, const std::string& suite_hint = {}) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config " + path);
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError("config " + path + " is not valid JSON: " + e.what());
  }
  return parse_config(j, suite_hint);
}

/// The effective configuration, echoed in reports.
inline nlohmann::json config_echo(const SuiteConfig& c) {
  nlohmann::json ex = nlohmann::json::array();
  for (const auto& e : c.exponents) ex.push_back(e.to_json());
  nlohmann::json tol = nlohmann::json::object();
  for (const auto& [k, v] : suite_tolerances(c.suite)) tol[k] = c.tol(k);
  nlohmann::json j = {{"suite", c.suite},
                      {"grid", {{"Lx", c.grid.Lx}, {"Lt", c.grid.Lt}, {"hx", c.grid.hx}, {"ht", c.grid.ht}}},
                      {"exponents", ex},
                      {"alpha", c.alphas},
                      {"N", c.Ns},
                      {"beta_margin", c.beta_margin},
                      {"seeds", c.seeds},
                      {"deltas", c.deltas},
                      {"centers", c.centers},
                      {"samples", c.samples},
                      {"families", c.families},
                      {"balls", c.balls},
                      {"tolerances", tol}};
  if (c.p0)
    j["p0"] = *c.p0;
  else
    j["p0"] = "auto";
  return j;
}

}  // namespace hha
