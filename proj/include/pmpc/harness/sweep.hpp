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

#ifndef PMPC__HARNESS__SWEEP_HPP_
#define PMPC__HARNESS__SWEEP_HPP_

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "pmpc/errors.hpp"
#include "pmpc/harness/config.hpp"
#include "pmpc/harness/simulation.hpp"
#include "pmpc/parallel.hpp"

namespace pmpc::harness {

enum class SweepAxis { Horizon, Particles, Scenarios, Epsilon, Seed };

inline SweepAxis parse_axis(const std::string & name)
{
  if (name == "N" || name == "horizon") {
    return SweepAxis::Horizon;
  }
  if (name == "N_p" || name == "particles") {
    return SweepAxis::Particles;
  }
  if (name == "N_s" || name == "scenarios") {
    return SweepAxis::Scenarios;
  }
  if (name == "epsilon" || name == "eps") {
    return SweepAxis::Epsilon;
  }
  if (name == "seed") {
    return SweepAxis::Seed;
  }
  throw ConfigError("unknown sweep axis \"" + name + "\" (expected N, N_p, N_s, epsilon or seed)");
}

inline const char * axis_name(SweepAxis axis)
{
  switch (axis) {
    case SweepAxis::Horizon:
      return "N";
    case SweepAxis::Particles:
      return "N_p";
    case SweepAxis::Scenarios:
      return "N_s";
    case SweepAxis::Epsilon:
      return "epsilon";
    case SweepAxis::Seed:
      return "seed";
  }
  return "unknown";
}

/// `base` with the axis set to `value`. Count axes require a nonnegative
/// integral value.
inline RunConfig with_axis_value(RunConfig cfg, SweepAxis axis, double value)
{
  auto as_count = [&] {
    if (!(value >= 0.0) || std::floor(value) != value) {
      throw ConfigError(std::string("sweep value for ") + axis_name(axis) + " must be a nonnegative integer");
    }
    return static_cast<std::size_t>(value);
  };
  switch (axis) {
    case SweepAxis::Horizon:
      cfg.horizon = as_count();
      if (cfg.epsilon.size() != 1) {
        cfg.epsilon.resize(1);
      }
      break;
    case SweepAxis::Particles:
      cfg.particles = as_count();
      break;
    case SweepAxis::Scenarios:
      cfg.scenarios = as_count();
      break;
    case SweepAxis::Epsilon:
      cfg.epsilon = {value};
      break;
    case SweepAxis::Seed:
      cfg.seed = as_count();
      break;
  }
  cfg.validate();
  return cfg;
}

struct Summary {
  double mean = 0.0;
  double min = 0.0;
  double max = 0.0;
  double median = 0.0;
};

inline Summary summarize(std::vector<double> values)
{
  Summary s;
  if (values.empty()) {
    return s;
  }
  std::sort(values.begin(), values.end());
  double total = 0.0;
  for (double v : values) {
    total += v;
  }
  s.mean = total / static_cast<double>(values.size());
  s.min = values.front();
  s.max = values.back();
  const std::size_t mid = values.size() / 2;
  s.median = values.size() % 2 == 1 ? values[mid] : 0.5 * (values[mid - 1] + values[mid]);
  return s;
}

struct SweepRow {
  double value = 0.0;
  std::vector<std::uint64_t> seeds;
  std::vector<RunMetrics> runs;
  Summary violations;
  Summary total_cost;
  Summary fallbacks;
  Summary mean_ess;
  Summary wall_time_per_step;
};

struct SweepOptions {
  std::size_t repeats = 1;
  /// Concurrent runs; each run uses `base.workers` internally.
  std::size_t run_workers = 1;
  /// When set, per-run traces go to <dir>/<axis>_<value>/seed_<seed>/ and
  /// the summary to <dir>/summary.json.
  std::optional<std::filesystem::path> out_dir;
};

inline json sweep_to_json(SweepAxis axis, const std::vector<SweepRow> & rows, const RunConfig & base)
{
  auto summary_json = [](const Summary & s) {
    return json{{"mean", s.mean}, {"min", s.min}, {"max", s.max}, {"median", s.median}};
  };
  json out = {{"axis", axis_name(axis)}, {"base_config", config_to_json(base)}, {"rows", json::array()}};
  for (const auto & r : rows) {
    json runs = json::array();
    for (std::size_t i = 0; i < r.runs.size(); ++i) {
      json m = metrics_to_json(r.runs[i]);
      m["seed"] = r.seeds[i];
      runs.push_back(std::move(m));
    }
    out["rows"].push_back({
      {"value", r.value},
      {"repeats", r.runs.size()},
      {"violation_count", summary_json(r.violations)},
      {"total_realized_cost", summary_json(r.total_cost)},
      {"fallback_count", summary_json(r.fallbacks)},
      {"mean_ess", summary_json(r.mean_ess)},
      {"wall_time_per_step", summary_json(r.wall_time_per_step)},
      {"runs", runs},
    });
  }
  return out;
}

inline std::string value_label(double v)
{
  if (std::floor(v) == v && std::abs(v) < 1e15) {
    return std::to_string(static_cast<long long>(v));
  }
  return detail::format_real(v);
}

/// Runs `repeats` seeds (base.seed, base.seed + 1, ...) for every value;
/// on the seed axis the seeds are value, value + 1, .... Runs are
/// independent and may execute concurrently; summaries do not depend on
/// `run_workers` apart from wall times.
inline std::vector<SweepRow> run_sweep(
  const RunConfig & base, SweepAxis axis, const std::vector<double> & values, const SweepOptions & opts)
{
  if (opts.repeats < 1) {
    throw ConfigError("repeats must be at least 1");
  }
  std::vector<RunConfig> configs;
  for (double value : values) {
    const RunConfig axis_cfg = with_axis_value(base, axis, value);
    for (std::size_t r = 0; r < opts.repeats; ++r) {
      RunConfig cfg = axis_cfg;
      cfg.seed = axis_cfg.seed + r;
      configs.push_back(std::move(cfg));
    }
  }
  std::vector<RunMetrics> metrics(configs.size());
  parallel_for(configs.size(), opts.run_workers, [&](std::size_t begin, std::size_t end, std::size_t) {
    for (std::size_t i = begin; i < end; ++i) {
      const auto run = run_closed_loop(configs[i]);
      metrics[i] = run.metrics;
      if (opts.out_dir) {
        const auto dir = *opts.out_dir / (std::string(axis_name(axis)) + "_" + value_label(values[i / opts.repeats])) /
                         ("seed_" + std::to_string(configs[i].seed));
        write_run(configs[i], run, dir);
      }
    }
  });

  std::vector<SweepRow> rows;
  rows.reserve(values.size());
  for (std::size_t v = 0; v < values.size(); ++v) {
    SweepRow row;
    row.value = values[v];
    std::vector<double> violations, cost, fallbacks, ess, wall;
    for (std::size_t r = 0; r < opts.repeats; ++r) {
      const std::size_t i = v * opts.repeats + r;
      row.seeds.push_back(configs[i].seed);
      row.runs.push_back(metrics[i]);
      violations.push_back(static_cast<double>(metrics[i].violation_count));
      cost.push_back(metrics[i].total_realized_cost);
      fallbacks.push_back(static_cast<double>(metrics[i].fallback_count));
      ess.push_back(metrics[i].mean_ess);
      wall.push_back(metrics[i].wall_time_per_step);
    }
    row.violations = summarize(violations);
    row.total_cost = summarize(cost);
    row.fallbacks = summarize(fallbacks);
    row.mean_ess = summarize(ess);
    row.wall_time_per_step = summarize(wall);
    rows.push_back(std::move(row));
  }
  if (opts.out_dir) {
    write_text(*opts.out_dir / "summary.json", sweep_to_json(axis, rows, base).dump(2) + "\n");
  }
  return rows;
}

}  // namespace pmpc::harness

#endif  // PMPC__HARNESS__SWEEP_HPP_
