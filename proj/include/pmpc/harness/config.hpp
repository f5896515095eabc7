// Copyright 2026 The PMPC Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef PMPC__HARNESS__CONFIG_HPP_
#define PMPC__HARNESS__CONFIG_HPP_

#include <cmath>
#include <cstdint>
#include <fstream>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "pmpc/densities.hpp"
#include "pmpc/errors.hpp"
#include "pmpc/models.hpp"
#include "pmpc/scenario.hpp"

namespace pmpc::harness {

using json = nlohmann::json;

/// Parses {"type":"uniform","lo":a,"hi":b}, {"type":"gaussian","mean":m,
/// "variance":v} or {"type":"point_mass","value":x}.
inline Density density_from_json(const json & j)
{
  if (!j.is_object() || !j.contains("type")) {
    throw ConfigError("density must be an object with a \"type\" field");
  }
  const auto type = j.at("type").get<std::string>();
  try {
    if (type == "uniform") {
      return Density::uniform(j.at("lo").get<double>(), j.at("hi").get<double>());
    }
    if (type == "gaussian") {
      return Density::gaussian(j.value("mean", 0.0), j.at("variance").get<double>());
    }
    if (type == "point_mass") {
      return Density::point_mass(j.at("value").get<double>());
    }
  } catch (const json::exception & e) {
    throw ConfigError("density \"" + type + "\": " + e.what());
  }
  throw ConfigError("unknown density type \"" + type + "\"");
}

inline json density_to_json(const Density & d)
{
  return std::visit(
    [](const auto & law) -> json {
      using T = std::decay_t<decltype(law)>;
      if constexpr (std::is_same_v<T, Uniform>) {
        return {{"type", "uniform"}, {"lo", law.lo}, {"hi", law.hi}};
      } else if constexpr (std::is_same_v<T, Gaussian>) {
        return {{"type", "gaussian"}, {"mean", law.mean}, {"variance", law.variance}};
      } else {
        return {{"type", "point_mass"}, {"value", law.value}};
      }
    },
    d.law());
}

enum class ConstraintType { None, LowerBound, UpperBound };

struct ConstraintConfig {
  ConstraintType type = ConstraintType::LowerBound;
  double value = 1.0;

  bool satisfied(double x) const
  {
    switch (type) {
      case ConstraintType::LowerBound:
        return x >= value;
      case ConstraintType::UpperBound:
        return x <= value;
      case ConstraintType::None:
        break;
    }
    return true;
  }
};

struct ModelConfig {
  std::string name = "paper_example";
  LinearGaussianParams linear;
  double a = 1.0;  ///< deterministic_linear
  double b = 1.0;  ///< deterministic_linear
  double x0 = 1.0;  ///< deterministic_linear
  std::optional<Density> process_noise;  ///< paper_example overrides
  std::optional<Density> measurement_noise;
  std::optional<Density> initial_state;
};

/// Quadratic costs c(x, u) = state_weight x^2 + control_weight u^2 and
/// c_N(x) = terminal_weight x^2.
struct CostConfig {
  double state_weight = 100.0;
  double control_weight = 1.0;
  double terminal_weight = 100.0;
};

struct RunConfig {
  ModelConfig model;
  std::size_t horizon = 3;
  std::size_t particles = 5000;
  std::size_t scenarios = 1000;
  std::vector<double> epsilon{0.1};
  double grid_lo = -5.0;
  double grid_hi = 5.0;
  double grid_spacing = 1.0;
  std::size_t steps = 30;
  std::uint64_t seed = 1;
  std::size_t workers = 1;
  CostConfig cost;
  std::optional<ConstraintConfig> constraint;  ///< unset: model default
  std::string output = ".";

  /// x >= 1 for paper_example, unconstrained otherwise, unless set.
  ConstraintConfig effective_constraint() const
  {
    if (constraint) {
      return *constraint;
    }
    if (model.name == "paper_example") {
      return {ConstraintType::LowerBound, 1.0};
    }
    return {ConstraintType::None, 0.0};
  }

  void validate() const
  {
    if (horizon < 1 || particles < 1 || scenarios < 1) {
      throw ConfigError("horizon, particles and scenarios must all be at least 1");
    }
    if (workers < 1) {
      throw ConfigError("workers must be at least 1");
    }
    uniform_grid(grid_lo, grid_hi, grid_spacing);
    if (epsilon.size() != 1 && epsilon.size() != horizon) {
      throw ConfigError("epsilon must be a scalar or have one entry per horizon step");
    }
    for (double e : epsilon) {
      if (!(e >= 0.0 && e < 1.0)) {
        throw ConfigError("epsilon must lie in [0, 1)");
      }
    }
  }
};

namespace detail {

inline std::size_t get_count(const json & j, const char * key, std::size_t fallback)
{
  if (!j.contains(key)) {
    return fallback;
  }
  const auto & v = j.at(key);
  if (!v.is_number_integer() || v.get<long long>() < 0) {
    throw ConfigError(std::string("\"") + key + "\" must be a nonnegative integer");
  }
  return v.get<std::size_t>();
}

}  // namespace detail

inline ModelConfig model_config_from_json(const json & j)
{
  ModelConfig m;
  if (j.is_string()) {
    m.name = j.get<std::string>();
  } else if (j.is_object()) {
    m.name = j.value("name", m.name);
    m.linear.a = j.value("a", m.linear.a);
    m.linear.b = j.value("b", m.linear.b);
    m.linear.q = j.value("q", m.linear.q);
    m.linear.r = j.value("r", m.linear.r);
    m.linear.x0_mean = j.value("x0_mean", m.linear.x0_mean);
    m.linear.x0_var = j.value("x0_var", m.linear.x0_var);
    m.a = j.value("a", m.a);
    m.b = j.value("b", m.b);
    m.x0 = j.value("x0", m.x0);
    if (j.contains("w_law")) {
      m.process_noise = density_from_json(j.at("w_law"));
    }
    if (j.contains("v_law")) {
      m.measurement_noise = density_from_json(j.at("v_law"));
    }
    if (j.contains("x0_law")) {
      m.initial_state = density_from_json(j.at("x0_law"));
    }
  } else {
    throw ConfigError("\"model\" must be a name or an object");
  }
  if (m.name != "paper_example" && m.name != "linear_gaussian" && m.name != "deterministic_linear") {
    throw ConfigError("unknown model \"" + m.name + "\"");
  }
  if (m.name != "paper_example" && (m.process_noise || m.measurement_noise || m.initial_state)) {
    throw ConfigError("density overrides are only supported for paper_example");
  }
  return m;
}

inline RunConfig config_from_json(const json & j)
{
  if (!j.is_object()) {
    throw ConfigError("config must be a JSON object");
  }
  RunConfig cfg;
  try {
    if (j.contains("model")) {
      cfg.model = model_config_from_json(j.at("model"));
    }
    cfg.horizon = detail::get_count(j, "horizon", cfg.horizon);
    cfg.particles = detail::get_count(j, "particles", cfg.particles);
    cfg.scenarios = detail::get_count(j, "scenarios", cfg.scenarios);
    cfg.steps = detail::get_count(j, "steps", cfg.steps);
    cfg.workers = detail::get_count(j, "workers", cfg.workers);
    if (j.contains("seed")) {
      cfg.seed = j.at("seed").get<std::uint64_t>();
    }
    if (j.contains("epsilon")) {
      const auto & e = j.at("epsilon");
      cfg.epsilon = e.is_array() ? e.get<std::vector<double>>() : std::vector<double>{e.get<double>()};
    }
    if (j.contains("control_grid")) {
      const auto & g = j.at("control_grid");
      cfg.grid_lo = g.value("lo", cfg.grid_lo);
      cfg.grid_hi = g.value("hi", cfg.grid_hi);
      cfg.grid_spacing = g.value("spacing", cfg.grid_spacing);
    }
    if (j.contains("cost")) {
      const auto & c = j.at("cost");
      cfg.cost.state_weight = c.value("state_weight", cfg.cost.state_weight);
      cfg.cost.control_weight = c.value("control_weight", cfg.cost.control_weight);
      cfg.cost.terminal_weight = c.value("terminal_weight", cfg.cost.terminal_weight);
    }
    if (j.contains("constraint")) {
      const auto & c = j.at("constraint");
      if (c.is_null() || (c.is_string() && c.get<std::string>() == "none")) {
        cfg.constraint = ConstraintConfig{ConstraintType::None, 0.0};
      } else {
        const auto type = c.at("type").get<std::string>();
        if (type == "lower_bound") {
          cfg.constraint = ConstraintConfig{ConstraintType::LowerBound, c.at("value").get<double>()};
        } else if (type == "upper_bound") {
          cfg.constraint = ConstraintConfig{ConstraintType::UpperBound, c.at("value").get<double>()};
        } else if (type == "none") {
          cfg.constraint = ConstraintConfig{ConstraintType::None, 0.0};
        } else {
          throw ConfigError("unknown constraint type \"" + type + "\"");
        }
      }
    }
    cfg.output = j.value("output", cfg.output);
  } catch (const json::exception & e) {
    throw ConfigError(std::string("config: ") + e.what());
  }
  cfg.validate();
  return cfg;
}

inline RunConfig load_config(const std::string & path)
{
  std::ifstream in(path);
  if (!in) {
    throw ConfigError("cannot open config file " + path);
  }
  json j;
  try {
    in >> j;
  } catch (const json::exception & e) {
    throw ConfigError("config " + path + ": " + e.what());
  }
  return config_from_json(j);
}

inline json config_to_json(const RunConfig & cfg)
{
  json model = {{"name", cfg.model.name}};
  if (cfg.model.name == "linear_gaussian") {
    model.update({{"a", cfg.model.linear.a}, {"b", cfg.model.linear.b}, {"q", cfg.model.linear.q},
                  {"r", cfg.model.linear.r}, {"x0_mean", cfg.model.linear.x0_mean},
                  {"x0_var", cfg.model.linear.x0_var}});
  } else if (cfg.model.name == "deterministic_linear") {
    model.update({{"a", cfg.model.a}, {"b", cfg.model.b}, {"x0", cfg.model.x0}});
  } else {
    if (cfg.model.process_noise) {
      model["w_law"] = density_to_json(*cfg.model.process_noise);
    }
    if (cfg.model.measurement_noise) {
      model["v_law"] = density_to_json(*cfg.model.measurement_noise);
    }
    if (cfg.model.initial_state) {
      model["x0_law"] = density_to_json(*cfg.model.initial_state);
    }
  }
  const auto constraint = cfg.effective_constraint();
  json constraint_json = "none";
  if (constraint.type == ConstraintType::LowerBound) {
    constraint_json = {{"type", "lower_bound"}, {"value", constraint.value}};
  } else if (constraint.type == ConstraintType::UpperBound) {
    constraint_json = {{"type", "upper_bound"}, {"value", constraint.value}};
  }
  return {
    {"model", model},
    {"horizon", cfg.horizon},
    {"particles", cfg.particles},
    {"scenarios", cfg.scenarios},
    {"epsilon", cfg.epsilon.size() == 1 ? json(cfg.epsilon.front()) : json(cfg.epsilon)},
    {"control_grid", {{"lo", cfg.grid_lo}, {"hi", cfg.grid_hi}, {"spacing", cfg.grid_spacing}}},
    {"steps", cfg.steps},
    {"seed", cfg.seed},
    {"cost",
     {{"state_weight", cfg.cost.state_weight},
      {"control_weight", cfg.cost.control_weight},
      {"terminal_weight", cfg.cost.terminal_weight}}},
    {"constraint", constraint_json},
  };
}

inline ScalarModel make_model(const ModelConfig & m)
{
  if (m.name == "paper_example") {
    auto laws = paper_example_laws();
    if (m.process_noise) {
      laws.process_noise = *m.process_noise;
    }
    if (m.measurement_noise) {
      laws.measurement_noise = *m.measurement_noise;
    }
    if (m.initial_state) {
      laws.initial_state = *m.initial_state;
    }
    return paper_example(laws);
  }
  if (m.name == "linear_gaussian") {
    return linear_gaussian(m.linear);
  }
  if (m.name == "deterministic_linear") {
    return deterministic_linear(m.a, m.b, m.x0);
  }
  throw ConfigError("unknown model \"" + m.name + "\"");
}

inline ScenarioProblem<1, 1> make_problem(const RunConfig & cfg)
{
  ScenarioProblem<1, 1> problem;
  problem.horizon = cfg.horizon;
  problem.scenarios = cfg.scenarios;
  problem.epsilon = cfg.epsilon;
  problem.workers = cfg.workers;
  problem.control_grid = uniform_grid(cfg.grid_lo, cfg.grid_hi, cfg.grid_spacing);
  problem.stage_cost = [c = cfg.cost](const std::array<double, 1> & x, const std::array<double, 1> & u) {
    return c.state_weight * x[0] * x[0] + c.control_weight * u[0] * u[0];
  };
  problem.terminal_cost = [c = cfg.cost](const std::array<double, 1> & x) {
    return c.terminal_weight * x[0] * x[0];
  };
  const auto constraint = cfg.effective_constraint();
  if (constraint.type != ConstraintType::None) {
    problem.constraint = [constraint](const std::array<double, 1> & x) { return constraint.satisfied(x[0]); };
  }
  problem.validate();
  return problem;
}

}  // namespace pmpc::harness

#endif  // PMPC__HARNESS__CONFIG_HPP_
