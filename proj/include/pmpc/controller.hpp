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

#ifndef PMPC__CONTROLLER_HPP_
#define PMPC__CONTROLLER_HPP_

#include <array>
#include <cstdint>
#include <optional>
#include <utility>

#include "pmpc/models.hpp"
#include "pmpc/particle_filter.hpp"
#include "pmpc/rng.hpp"
#include "pmpc/scenario.hpp"

namespace pmpc {

/// Random streams owned by one controller.
struct ControllerStreams {
  RngStream process_noise;
  RngStream resampling;
  RngStream scenarios;

  explicit ControllerStreams(std::uint64_t seed)
  : process_noise(seed, streams::kFilterProcessNoise), resampling(seed, streams::kResampling),
    scenarios(seed, streams::kScenarios)
  {
  }
};

template <std::size_t Nx, std::size_t Nu>
struct ControllerState {
  ParticleSet<Nx> prior;
  std::optional<ScenarioSolution<Nu>> last_solution;
  std::size_t t = 0;
};

template <std::size_t Nx, std::size_t Nu>
struct StepDiagnostics {
  /// Statistics of the likelihood-weighted set, before resampling.
  FilterStats<Nx> filter;
  ScenarioSolution<Nu> solution;
};

template <std::size_t Nx, std::size_t Nu>
struct StepResult {
  std::array<double, Nu> u{};
  ControllerState<Nx, Nu> state;
  StepDiagnostics<Nx, Nu> diagnostics;
};

/// Draws the initial a-priori particles from the model prior.
template <std::size_t Nx, std::size_t Nu, std::size_t Ny>
ControllerState<Nx, Nu> init_controller(
  const StochasticModel<Nx, Nu, Ny> & model, std::size_t n_p, std::uint64_t seed)
{
  RngStream rng(seed, streams::kFilterInit);
  return ControllerState<Nx, Nu>{init_particles(model, n_p, rng), std::nullopt, 0};
}

/// One closed-loop step: weight the prior by y, resample, solve the
/// scenario problem from the posterior, apply the first control and
/// propagate the posterior with it. The remaining controls of the optimal
/// sequence are only kept in `last_solution`.
template <std::size_t Nx, std::size_t Nu, std::size_t Ny>
StepResult<Nx, Nu> pmpc_step(
  const ControllerState<Nx, Nu> & state, const std::array<double, Ny> & y,
  const StochasticModel<Nx, Nu, Ny> & model, const ScenarioProblem<Nx, Nu> & problem,
  ControllerStreams & rng)
{
  auto weighted = measurement_update(state.prior, model, y, problem.workers);
  StepResult<Nx, Nu> out;
  out.diagnostics.filter = stats(weighted);

  const auto posterior = resample(weighted, rng.resampling);
  const auto ensemble = build_ensemble(posterior, problem, model, rng.scenarios);
  out.diagnostics.solution = solve(ensemble, problem, model);
  out.u = out.diagnostics.solution.sequence.front();

  out.state.prior = time_update(posterior, model, out.u, rng.process_noise, problem.workers);
  out.state.last_solution = out.diagnostics.solution;
  out.state.t = state.t + 1;
  return out;
}

/// Stateful wrapper around pmpc_step for a single driver.
template <std::size_t Nx, std::size_t Nu, std::size_t Ny>
class ParticleMpc {
public:
  using Model = StochasticModel<Nx, Nu, Ny>;
  using Problem = ScenarioProblem<Nx, Nu>;

  ParticleMpc(Model model, Problem problem, std::size_t n_p, std::uint64_t seed)
  : model_(std::move(model)), problem_(std::move(problem)), streams_(seed),
    state_(init_controller(model_, n_p, seed))
  {
    problem_.validate();
  }

  /// Consumes y_t and returns (u_t, diagnostics).
  std::pair<std::array<double, Nu>, StepDiagnostics<Nx, Nu>> step(const std::array<double, Ny> & y)
  {
    auto result = pmpc_step(state_, y, model_, problem_, streams_);
    state_ = std::move(result.state);
    return {result.u, std::move(result.diagnostics)};
  }

  const ControllerState<Nx, Nu> & state() const noexcept { return state_; }
  const Model & model() const noexcept { return model_; }
  const Problem & problem() const noexcept { return problem_; }

private:
  Model model_;
  Problem problem_;
  ControllerStreams streams_;
  ControllerState<Nx, Nu> state_;
};

}  // namespace pmpc

#endif  // PMPC__CONTROLLER_HPP_
