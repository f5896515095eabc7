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

#ifndef PMPC__HARNESS__PF_CHECK_HPP_
#define PMPC__HARNESS__PF_CHECK_HPP_

#include <chrono>
#include <cmath>
#include <cstdint>
#include <vector>

#include "pmpc/harness/config.hpp"
#include "pmpc/models.hpp"
#include "pmpc/particle_filter.hpp"
#include "pmpc/rng.hpp"

namespace pmpc::harness {

/// Particle filter vs exact Kalman filter on a scalar linear-Gaussian model.
struct PfCheckOptions {
  LinearGaussianParams model{0.9, 1.0, 1.0, 1.0, 0.0, 1.0};
  std::size_t particles = 10000;
  std::size_t steps = 50;
  std::uint64_t seed = 7;
  double mean_tolerance = 0.1;  ///< time-averaged |mean error|
  double variance_tolerance = 0.1;  ///< time-averaged relative variance error
};

struct PfCheckStep {
  double u = 0.0;
  double y = 0.0;
  double kf_mean = 0.0;
  double kf_variance = 0.0;
  double pf_mean = 0.0;
  double pf_variance = 0.0;
};

struct PfCheckReport {
  std::vector<PfCheckStep> steps;
  double mean_abs_error = 0.0;
  double mean_rel_variance_error = 0.0;
  double seconds = 0.0;
  bool passed = false;
};

/// Input record used by the check: u_t = sin(0.3 t).
inline double pf_check_input(std::size_t t) { return std::sin(0.3 * static_cast<double>(t)); }

inline PfCheckReport run_pf_check(const PfCheckOptions & opts)
{
  const auto model = linear_gaussian(opts.model);
  const auto & p = opts.model;

  // Measurement record from a simulated true system.
  RngStream x0_rng(opts.seed, streams::kTrueInitialState);
  RngStream w_rng(opts.seed, streams::kTrueProcessNoise);
  RngStream v_rng(opts.seed, streams::kTrueMeasurementNoise);
  auto x = sample(model.initial_state, x0_rng);
  std::vector<double> ys(opts.steps);
  for (std::size_t t = 0; t < opts.steps; ++t) {
    ys[t] = measure(model, x, sample(model.measurement_noise, v_rng))[0];
    x = step(model, x, {pf_check_input(t)}, sample(model.process_noise, w_rng));
  }

  const auto start = std::chrono::steady_clock::now();
  PfCheckReport report;
  RngStream init_rng(opts.seed, streams::kFilterInit);
  RngStream resample_rng(opts.seed, streams::kResampling);
  RngStream noise_rng(opts.seed, streams::kFilterProcessNoise);
  auto prior = init_particles(model, opts.particles, init_rng);
  double kf_mean = p.x0_mean;
  double kf_var = p.x0_var;
  for (std::size_t t = 0; t < opts.steps; ++t) {
    PfCheckStep row;
    row.u = pf_check_input(t);
    row.y = ys[t];

    const double gain = kf_var / (kf_var + p.r);
    kf_mean += gain * (row.y - kf_mean);
    kf_var *= 1.0 - gain;
    row.kf_mean = kf_mean;
    row.kf_variance = kf_var;

    const auto weighted = measurement_update(prior, model, {row.y});
    double mean = 0.0;
    for (std::size_t i = 0; i < weighted.size(); ++i) {
      mean += weighted.weights[i] * weighted.particles[i][0];
    }
    double var = 0.0;
    for (std::size_t i = 0; i < weighted.size(); ++i) {
      const double d = weighted.particles[i][0] - mean;
      var += weighted.weights[i] * d * d;
    }
    row.pf_mean = mean;
    row.pf_variance = var;

    prior = time_update(resample(weighted, resample_rng), model, {row.u}, noise_rng);
    kf_mean = p.a * kf_mean + p.b * row.u;
    kf_var = p.a * p.a * kf_var + p.q;

    report.mean_abs_error += std::abs(row.pf_mean - row.kf_mean);
    report.mean_rel_variance_error += std::abs(row.pf_variance - row.kf_variance) / row.kf_variance;
    report.steps.push_back(row);
  }
  const std::chrono::duration<double> elapsed = std::chrono::steady_clock::now() - start;
  if (opts.steps > 0) {
    report.mean_abs_error /= static_cast<double>(opts.steps);
    report.mean_rel_variance_error /= static_cast<double>(opts.steps);
  }
  report.seconds = elapsed.count();
  report.passed =
    report.mean_abs_error <= opts.mean_tolerance && report.mean_rel_variance_error <= opts.variance_tolerance;
  return report;
}

inline json pf_check_to_json(const PfCheckOptions & opts, const PfCheckReport & report)
{
  json steps = json::array();
  for (std::size_t t = 0; t < report.steps.size(); ++t) {
    const auto & s = report.steps[t];
    steps.push_back({{"t", t}, {"u", s.u}, {"y", s.y}, {"kf_mean", s.kf_mean}, {"kf_variance", s.kf_variance},
                     {"pf_mean", s.pf_mean}, {"pf_variance", s.pf_variance}});
  }
  return {
    {"model",
     {{"name", "linear_gaussian"}, {"a", opts.model.a}, {"b", opts.model.b}, {"q", opts.model.q},
      {"r", opts.model.r}, {"x0_mean", opts.model.x0_mean}, {"x0_var", opts.model.x0_var}}},
    {"particles", opts.particles},
    {"steps", opts.steps},
    {"seed", opts.seed},
    {"mean_abs_error", report.mean_abs_error},
    {"mean_abs_error_tolerance", opts.mean_tolerance},
    {"mean_rel_variance_error", report.mean_rel_variance_error},
    {"mean_rel_variance_error_tolerance", opts.variance_tolerance},
    {"seconds", report.seconds},
    {"passed", report.passed},
    {"trajectory", steps},
  };
}

}  // namespace pmpc::harness

#endif  // PMPC__HARNESS__PF_CHECK_HPP_
