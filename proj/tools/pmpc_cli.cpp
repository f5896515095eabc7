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

// Command-line driver: closed-loop simulation, parameter sweeps and the
// particle-filter / Kalman-filter correspondence check.

#include <filesystem>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "pmpc/errors.hpp"
#include "pmpc/harness/config.hpp"
#include "pmpc/harness/pf_check.hpp"
#include "pmpc/harness/simulation.hpp"
#include "pmpc/harness/sweep.hpp"

namespace {

std::vector<double> parse_values(const std::string & text)
{
  std::vector<double> values;
  std::stringstream in(text);
  std::string item;
  while (std::getline(in, item, ',')) {
    if (item.empty()) {
      continue;
    }
    std::size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(item, &used);
    } catch (const std::exception &) {
      used = 0;
    }
    if (used != item.size()) {
      throw pmpc::ConfigError("cannot parse sweep value \"" + item + "\"");
    }
    values.push_back(v);
  }
  return values;
}

}  // namespace

int main(int argc, char ** argv)
{
  namespace h = pmpc::harness;

  CLI::App app{"Particle model predictive control: simulation and reproduction tools"};
  app.require_subcommand(1);

  std::string sim_config;
  std::optional<std::uint64_t> sim_seed;
  std::optional<std::string> sim_out;
  auto * simulate = app.add_subcommand("simulate", "Run one closed-loop simulation; writes trace.csv and metrics.json");
  simulate->add_option("--config", sim_config, "JSON run configuration")->required()->check(CLI::ExistingFile);
  simulate->add_option("--seed", sim_seed, "Override the configured seed");
  simulate->add_option("--out", sim_out, "Output directory (default: config \"output\")");

  std::string sweep_config;
  std::string sweep_axis;
  std::string sweep_values;
  std::size_t sweep_repeats = 1;
  std::size_t sweep_workers = 1;
  std::string sweep_out;
  auto * sweep = app.add_subcommand("sweep", "Sweep one parameter over several seeds; writes summary.json and traces");
  sweep->add_option("--config", sweep_config, "JSON base configuration")->required()->check(CLI::ExistingFile);
  sweep->add_option("--axis", sweep_axis, "N, N_p, N_s, epsilon or seed")->required();
  sweep->add_option("--values", sweep_values, "Comma-separated values, e.g. 50,1000")->required();
  sweep->add_option("--repeats", sweep_repeats, "Seeds per value")->check(CLI::PositiveNumber);
  sweep->add_option("--workers", sweep_workers, "Concurrent runs")->check(CLI::PositiveNumber);
  sweep->add_option("--out", sweep_out, "Output directory")->required();

  std::string check_out;
  h::PfCheckOptions check_opts;
  auto * pf_check = app.add_subcommand("pf-check", "Compare the particle filter against an exact Kalman filter");
  pf_check->add_option("--out", check_out, "Output directory for pf_check.json")->required();
  pf_check->add_option("--particles", check_opts.particles, "Particle count")->check(CLI::PositiveNumber);
  pf_check->add_option("--steps", check_opts.steps, "Time steps");
  pf_check->add_option("--seed", check_opts.seed, "Seed");

  CLI11_PARSE(app, argc, argv);

  try {
    if (simulate->parsed()) {
      auto cfg = h::load_config(sim_config);
      if (sim_seed) {
        cfg.seed = *sim_seed;
      }
      if (sim_out) {
        cfg.output = *sim_out;
      }
      const auto run = h::run_closed_loop(cfg);
      h::write_run(cfg, run, cfg.output);
      const auto & m = run.metrics;
      std::cout << "steps=" << m.steps << " violations=" << m.violation_count
                << " total_cost=" << m.total_realized_cost << " fallbacks=" << m.fallback_count
                << " wall_per_step=" << m.wall_time_per_step << "s\n"
                << "wrote " << (std::filesystem::path(cfg.output) / "trace.csv").string() << '\n';
    } else if (sweep->parsed()) {
      const auto base = h::load_config(sweep_config);
      const auto axis = h::parse_axis(sweep_axis);
      h::SweepOptions opts;
      opts.repeats = sweep_repeats;
      opts.run_workers = sweep_workers;
      opts.out_dir = sweep_out;
      const auto rows = h::run_sweep(base, axis, parse_values(sweep_values), opts);
      for (const auto & r : rows) {
        std::cout << h::axis_name(axis) << '=' << h::value_label(r.value) << " violations(mean/min/max)="
                  << r.violations.mean << '/' << r.violations.min << '/' << r.violations.max
                  << " cost(mean)=" << r.total_cost.mean << '\n';
      }
      std::cout << "wrote " << (std::filesystem::path(sweep_out) / "summary.json").string() << '\n';
    } else if (pf_check->parsed()) {
      const auto report = h::run_pf_check(check_opts);
      h::write_text(
        std::filesystem::path(check_out) / "pf_check.json", h::pf_check_to_json(check_opts, report).dump(2) + "\n");
      std::cout << (report.passed ? "PASS" : "FAIL") << " mean_abs_error=" << report.mean_abs_error
                << " (tol " << check_opts.mean_tolerance << ") mean_rel_variance_error="
                << report.mean_rel_variance_error << " (tol " << check_opts.variance_tolerance << ") "
                << report.seconds << "s\n";
      return report.passed ? 0 : 1;
    }
  } catch (const pmpc::ConfigError & e) {
    std::cerr << "config error: " << e.what() << '\n';
    return 2;
  } catch (const pmpc::NumericalError & e) {
    std::cerr << "numerical error: " << e.what() << '\n';
    return 3;
  }
  return 0;
}
