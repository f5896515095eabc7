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

#ifndef PMPC__HARNESS__SIMULATION_HPP_
#define PMPC__HARNESS__SIMULATION_HPP_

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "pmpc/controller.hpp"
#include "pmpc/harness/config.hpp"
#include "pmpc/models.hpp"
#include "pmpc/rng.hpp"

namespace pmpc::harness {

/// One row per closed-loop step.
struct TraceRow {
  std::size_t t = 0;
  double x_true = 0.0;
  double y = 0.0;
  double u = 0.0;
  double pf_mean = 0.0;
  double pf_q025 = 0.0;
  double pf_q975 = 0.0;
  double ess = 0.0;
  double stage_cost = 0.0;
  bool constraint_ok = true;
  bool fallback_used = false;
  bool degenerate_flag = false;

  // Not part of the CSV contract.
  double w_drawn = 0.0;
  double v_drawn = 0.0;
  std::vector<double> planned_sequence;
};

struct SimulationTrace {
  double x0 = 0.0;
  std::vector<TraceRow> rows;
};

struct RunMetrics {
  std::size_t steps = 0;
  std::size_t violation_count = 0;
  double total_realized_cost = 0.0;
  double mean_ess = 0.0;
  std::size_t fallback_count = 0;
  std::size_t degenerate_count = 0;
  double wall_time_per_step = 0.0;  ///< seconds
  double final_state = 0.0;
};

struct RunResult {
  SimulationTrace trace;
  RunMetrics metrics;
};

inline constexpr const char * kTraceHeader =
  "t,x_true,y,u,pf_mean,pf_q025,pf_q975,ess,stage_cost,constraint_ok,fallback_used,degenerate_flag";

/// Closed-loop simulation of the configured model under PMPC.
///
/// The true system draws x0, w_t and v_t from their own streams, disjoint
/// from every controller stream, so the realized noise sequence depends
/// only on the seed. Each step: draw v_t, measure, run the controller,
/// record, draw w_t, advance. Total realized cost is the sum of the stage
/// costs plus the terminal cost of the state after the last step (zero
/// when steps == 0). Violations are counted on the recorded true states.
inline RunResult run_closed_loop(const RunConfig & cfg)
{
  cfg.validate();
  const auto model = make_model(cfg.model);
  const auto problem = make_problem(cfg);
  const auto constraint = cfg.effective_constraint();

  RngStream x0_rng(cfg.seed, streams::kTrueInitialState);
  RngStream w_rng(cfg.seed, streams::kTrueProcessNoise);
  RngStream v_rng(cfg.seed, streams::kTrueMeasurementNoise);

  RunResult result;
  ScalarModel::State x = sample(model.initial_state, x0_rng);
  result.trace.x0 = x[0];
  if (cfg.steps == 0) {
    return result;
  }

  ParticleMpc<1, 1, 1> controller(model, problem, cfg.particles, cfg.seed);
  result.trace.rows.reserve(cfg.steps);
  double ess_sum = 0.0;
  const auto start = std::chrono::steady_clock::now();
  for (std::size_t t = 0; t < cfg.steps; ++t) {
    try {
      const auto v = sample(model.measurement_noise, v_rng);
      const auto y = measure(model, x, v);
      const auto [u, diag] = controller.step(y);

      TraceRow row;
      row.t = t;
      row.x_true = x[0];
      row.y = y[0];
      row.u = u[0];
      row.pf_mean = diag.filter.mean[0];
      row.pf_q025 = diag.filter.quantile_lo[0];
      row.pf_q975 = diag.filter.quantile_hi[0];
      row.ess = diag.filter.effective_sample_size;
      row.stage_cost = cfg.cost.state_weight * x[0] * x[0] + cfg.cost.control_weight * u[0] * u[0];
      row.constraint_ok = constraint.satisfied(x[0]);
      row.fallback_used = diag.solution.fallback_used;
      row.degenerate_flag = diag.filter.degenerate;
      row.v_drawn = v[0];
      for (const auto & planned : diag.solution.sequence) {
        row.planned_sequence.push_back(planned[0]);
      }

      const auto w = sample(model.process_noise, w_rng);
      row.w_drawn = w[0];
      x = step(model, x, u, w);

      result.metrics.violation_count += row.constraint_ok ? 0 : 1;
      result.metrics.total_realized_cost += row.stage_cost;
      result.metrics.fallback_count += row.fallback_used ? 1 : 0;
      result.metrics.degenerate_count += row.degenerate_flag ? 1 : 0;
      ess_sum += row.ess;
      result.trace.rows.push_back(std::move(row));
    } catch (const NumericalError & e) {
      throw NumericalError("step " + std::to_string(t) + ": " + e.what());
    }
  }
  const std::chrono::duration<double> elapsed = std::chrono::steady_clock::now() - start;

  result.metrics.steps = cfg.steps;
  result.metrics.total_realized_cost += cfg.cost.terminal_weight * x[0] * x[0];
  result.metrics.mean_ess = ess_sum / static_cast<double>(cfg.steps);
  result.metrics.wall_time_per_step = elapsed.count() / static_cast<double>(cfg.steps);
  result.metrics.final_state = x[0];
  return result;
}

namespace detail {

inline std::string format_real(double v)
{
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

}  // namespace detail

inline void write_trace_csv(const SimulationTrace & trace, std::ostream & out)
{
  using detail::format_real;
  out << kTraceHeader << '\n';
  for (const auto & r : trace.rows) {
    out << r.t << ',' << format_real(r.x_true) << ',' << format_real(r.y) << ',' << format_real(r.u) << ','
        << format_real(r.pf_mean) << ',' << format_real(r.pf_q025) << ',' << format_real(r.pf_q975) << ','
        << format_real(r.ess) << ',' << format_real(r.stage_cost) << ',' << (r.constraint_ok ? 1 : 0) << ','
        << (r.fallback_used ? 1 : 0) << ',' << (r.degenerate_flag ? 1 : 0) << '\n';
  }
}

inline std::string trace_csv(const SimulationTrace & trace)
{
  std::ostringstream out;
  write_trace_csv(trace, out);
  return out.str();
}

inline json metrics_to_json(const RunMetrics & m)
{
  return {
    {"steps", m.steps},
    {"violation_count", m.violation_count},
    {"total_realized_cost", m.total_realized_cost},
    {"mean_ess", m.mean_ess},
    {"fallback_count", m.fallback_count},
    {"degenerate_count", m.degenerate_count},
    {"wall_time_per_step", m.wall_time_per_step},
    {"final_state", m.final_state},
  };
}

inline void write_text(const std::filesystem::path & path, const std::string & text)
{
  if (path.has_parent_path()) {
    std::filesystem::create_directories(path.parent_path());
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    throw ConfigError("cannot write " + path.string());
  }
  out << text;
}

/// Writes trace.csv and metrics.json (metrics plus the echoed config) to `dir`.
inline void write_run(const RunConfig & cfg, const RunResult & run, const std::filesystem::path & dir)
{
  write_text(dir / "trace.csv", trace_csv(run.trace));
  json metrics = metrics_to_json(run.metrics);
  metrics["config"] = config_to_json(cfg);
  write_text(dir / "metrics.json", metrics.dump(2) + "\n");
}

}  // namespace pmpc::harness

#endif  // PMPC__HARNESS__SIMULATION_HPP_
