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

#ifndef PMPC__SCENARIO_HPP_
#define PMPC__SCENARIO_HPP_

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <functional>
#include <limits>
#include <string>
#include <vector>

#include "pmpc/errors.hpp"
#include "pmpc/models.hpp"
#include "pmpc/parallel.hpp"
#include "pmpc/particle_filter.hpp"
#include "pmpc/rng.hpp"

namespace pmpc {

/// Minimum number of the n_s scenarios that must satisfy a constraint with
/// violation level epsilon: ceil((1 - epsilon) n_s). A 1e-9 slack absorbs
/// the rounding of (1 - epsilon) so that e.g. epsilon = 0.3, n_s = 10
/// gives 7 rather than 8.
inline std::size_t chance_threshold(double epsilon, std::size_t n_s)
{
  const double required = (1.0 - epsilon) * static_cast<double>(n_s);
  const double rounded = std::ceil(required - 1e-9);
  return static_cast<std::size_t>(std::clamp(rounded, 0.0, static_cast<double>(n_s)));
}

/** \brief Sampled finite-horizon problem over a finite control grid.

    minimize  sum_s ( sum_{k<N} c(x_{k,s}, u_k) + c_N(x_{N,s}) )
    s.t.      x_{k+1,s} = f(x_{k,s}, u_k, w_{k,s}),  u_k in control_grid,
              #{s : x_{k+1,s} in X_{k+1}} >= chance_threshold(eps_{k+1}, n_s).

    `epsilon[k]` is the violation level of the constraint on x_{k+1}; a
    single entry applies to every step. An empty `constraint` leaves the
    problem unconstrained.
 */
template <std::size_t Nx, std::size_t Nu>
struct ScenarioProblem {
  using State = std::array<double, Nx>;
  using Control = std::array<double, Nu>;

  std::size_t horizon = 1;
  std::function<double(const State &, const Control &)> stage_cost;
  std::function<double(const State &)> terminal_cost;
  std::vector<Control> control_grid;
  std::function<bool(const State &)> constraint;
  std::vector<double> epsilon{0.0};
  std::size_t scenarios = 1;
  /// Worker threads for candidate evaluation; results do not depend on it.
  std::size_t workers = 1;

  double epsilon_at(std::size_t k) const { return epsilon.size() == 1 ? epsilon.front() : epsilon.at(k); }

  std::size_t threshold(std::size_t k) const
  {
    return constraint ? chance_threshold(epsilon_at(k), scenarios) : 0;
  }

  void validate() const
  {
    if (horizon < 1) {
      throw ConfigError("horizon must be at least 1");
    }
    if (control_grid.empty()) {
      throw ConfigError("control grid must be nonempty");
    }
    if (scenarios < 1) {
      throw ConfigError("scenario count must be at least 1");
    }
    if (!stage_cost || !terminal_cost) {
      throw ConfigError("stage and terminal costs are required");
    }
    if (epsilon.size() != 1 && epsilon.size() != horizon) {
      throw ConfigError(
        "epsilon must have 1 or horizon (" + std::to_string(horizon) + ") entries, got " +
        std::to_string(epsilon.size()));
    }
    for (double e : epsilon) {
      if (!(e >= 0.0 && e < 1.0)) {
        throw ConfigError("epsilon must lie in [0, 1), got " + std::to_string(e));
      }
    }
  }
};

/// Initial states and frozen process noise shared by every candidate
/// sequence of one optimization (common random numbers).
template <std::size_t Nx>
struct ScenarioEnsemble {
  using State = std::array<double, Nx>;

  std::size_t horizon = 0;
  std::vector<State> initial_states;
  /// Row-major n_s x horizon.
  std::vector<State> noise;

  std::size_t size() const noexcept { return initial_states.size(); }
  const State & noise_at(std::size_t s, std::size_t k) const { return noise[s * horizon + k]; }
};

template <std::size_t Nu>
struct ScenarioSolution {
  std::vector<std::array<double, Nu>> sequence;
  std::vector<std::size_t> grid_indices;
  double cost = 0.0;
  std::vector<std::size_t> per_step_satisfaction;
  bool feasible = false;
  bool fallback_used = false;
};

struct SequenceEvaluation {
  double cost = 0.0;
  std::vector<std::size_t> per_step_satisfaction;
};

/// Draws n_s initial states uniformly with replacement from the posterior
/// particles, then n_s x N process-noise vectors in (scenario, step) order.
template <std::size_t Nx, std::size_t Nu, std::size_t Ny>
ScenarioEnsemble<Nx> build_ensemble(
  const ParticleSet<Nx> & posterior, const ScenarioProblem<Nx, Nu> & problem,
  const StochasticModel<Nx, Nu, Ny> & model, RngStream & rng)
{
  if (posterior.size() == 0) {
    throw ConfigError("build_ensemble needs a nonempty posterior");
  }
  ScenarioEnsemble<Nx> ens;
  ens.horizon = problem.horizon;
  ens.initial_states.reserve(problem.scenarios);
  for (std::size_t s = 0; s < problem.scenarios; ++s) {
    ens.initial_states.push_back(posterior.particles[rng.uniform_index(posterior.size())]);
  }
  ens.noise.reserve(problem.scenarios * problem.horizon);
  for (std::size_t i = 0; i < problem.scenarios * problem.horizon; ++i) {
    ens.noise.push_back(sample(model.process_noise, rng));
  }
  return ens;
}

namespace detail {

[[noreturn]] inline void throw_scenario_error(
  const std::string & model, const char * what, std::size_t s, std::size_t k)
{
  throw NumericalError(
    model + ": non-finite " + what + " in scenario " + std::to_string(s) + " at step " + std::to_string(k));
}

}  // namespace detail

/// Rolls every scenario forward under `sequence` with the frozen noise.
///
/// Per scenario the cost is accumulated as ((c_0 + c_1) + ...) + c_N and
/// the scenario totals are then summed in scenario order; `solve` uses the
/// same order, so the two agree bit for bit.
template <std::size_t Nx, std::size_t Nu, std::size_t Ny>
SequenceEvaluation evaluate_sequence(
  const std::vector<std::array<double, Nu>> & sequence, const ScenarioEnsemble<Nx> & ens,
  const ScenarioProblem<Nx, Nu> & problem, const StochasticModel<Nx, Nu, Ny> & model)
{
  if (sequence.size() != problem.horizon || ens.horizon != problem.horizon) {
    throw ConfigError("sequence length and ensemble horizon must equal the problem horizon");
  }
  SequenceEvaluation out;
  out.per_step_satisfaction.assign(problem.horizon, 0);
  for (std::size_t s = 0; s < ens.size(); ++s) {
    auto x = ens.initial_states[s];
    double acc = 0.0;
    for (std::size_t k = 0; k < problem.horizon; ++k) {
      const double c = problem.stage_cost(x, sequence[k]);
      if (!std::isfinite(c)) {
        detail::throw_scenario_error(model.name, "stage cost", s, k);
      }
      acc += c;
      x = model.transition(x, sequence[k], ens.noise_at(s, k));
      if (!detail::all_finite(x)) {
        detail::throw_scenario_error(model.name, "state", s, k);
      }
      if (!problem.constraint || problem.constraint(x)) {
        ++out.per_step_satisfaction[k];
      }
    }
    const double terminal = problem.terminal_cost(x);
    if (!std::isfinite(terminal)) {
      detail::throw_scenario_error(model.name, "terminal cost", s, problem.horizon);
    }
    acc += terminal;
    out.cost += acc;
  }
  return out;
}

namespace detail {

/// Best candidates seen by one worker over a contiguous range of first
/// controls. Candidates arrive in lexicographic order, so strict
/// comparisons keep the earliest on ties.
struct SearchResult {
  bool has_feasible = false;
  double feasible_cost = 0.0;
  std::vector<std::size_t> feasible_indices;
  std::vector<std::size_t> feasible_satisfaction;

  bool has_fallback = false;
  std::size_t fallback_min_satisfaction = 0;
  double fallback_cost = 0.0;
  std::vector<std::size_t> fallback_indices;
  std::vector<std::size_t> fallback_satisfaction;

  void offer(
    double cost, const std::vector<std::size_t> & indices, const std::vector<std::size_t> & satisfaction,
    bool feasible)
  {
    if (feasible) {
      if (!has_feasible || cost < feasible_cost) {
        has_feasible = true;
        feasible_cost = cost;
        feasible_indices = indices;
        feasible_satisfaction = satisfaction;
      }
      return;
    }
    if (has_feasible) {
      return;
    }
    const std::size_t min_sat = *std::min_element(satisfaction.begin(), satisfaction.end());
    if (
      !has_fallback || min_sat > fallback_min_satisfaction ||
      (min_sat == fallback_min_satisfaction && cost < fallback_cost)) {
      has_fallback = true;
      fallback_min_satisfaction = min_sat;
      fallback_cost = cost;
      fallback_indices = indices;
      fallback_satisfaction = satisfaction;
    }
  }

  /// Folds in a result covering a lexicographically later range.
  void merge(const SearchResult & later)
  {
    if (later.has_feasible) {
      offer(later.feasible_cost, later.feasible_indices, later.feasible_satisfaction, true);
    }
    if (!has_feasible && later.has_fallback) {
      offer(later.fallback_cost, later.fallback_indices, later.fallback_satisfaction, false);
    }
  }
};

/// Depth-first enumeration of the control tree. Scenario states and
/// accumulated costs of a prefix are computed once and shared by all of its
/// completions, so a horizon-N search costs sum_{k=1..N} |U|^k scenario
/// steps rather than N |U|^N.
template <std::size_t Nx, std::size_t Nu, std::size_t Ny>
class TreeSearch {
public:
  using State = std::array<double, Nx>;

  TreeSearch(
    const ScenarioEnsemble<Nx> & ens, const ScenarioProblem<Nx, Nu> & problem,
    const StochasticModel<Nx, Nu, Ny> & model)
  : ens_(ens), problem_(problem), model_(model), n_s_(ens.size()), horizon_(problem.horizon),
    states_(horizon_, std::vector<State>(n_s_)), costs_(horizon_, std::vector<double>(n_s_, 0.0)),
    zeros_(n_s_, 0.0), indices_(horizon_, 0), satisfaction_(horizon_, 0), thresholds_(horizon_, 0)
  {
    for (std::size_t k = 0; k < horizon_; ++k) {
      thresholds_[k] = problem.threshold(k);
    }
  }

  SearchResult run(std::size_t first_begin, std::size_t first_end)
  {
    result_ = SearchResult{};
    expand(0, first_begin, first_end);
    return result_;
  }

private:
  void expand(std::size_t level, std::size_t grid_begin, std::size_t grid_end)
  {
    const std::vector<State> & x_in = level == 0 ? ens_.initial_states : states_[level - 1];
    const std::vector<double> & acc_in = level == 0 ? zeros_ : costs_[level - 1];
    const bool leaf = level + 1 == horizon_;
    const auto & grid = problem_.control_grid;

    for (std::size_t g = grid_begin; g < grid_end; ++g) {
      const auto & u = grid[g];
      indices_[level] = g;
      std::size_t count = 0;
      double total = 0.0;
      for (std::size_t s = 0; s < n_s_; ++s) {
        const double c = problem_.stage_cost(x_in[s], u);
        if (!std::isfinite(c)) {
          throw_scenario_error(model_.name, "stage cost", s, level);
        }
        const double acc = acc_in[s] + c;
        const State x = model_.transition(x_in[s], u, ens_.noise_at(s, level));
        if (!all_finite(x)) {
          throw_scenario_error(model_.name, "state", s, level);
        }
        if (!problem_.constraint || problem_.constraint(x)) {
          ++count;
        }
        if (leaf) {
          const double terminal = problem_.terminal_cost(x);
          if (!std::isfinite(terminal)) {
            throw_scenario_error(model_.name, "terminal cost", s, horizon_);
          }
          total += acc + terminal;
        } else {
          costs_[level][s] = acc;
          states_[level][s] = x;
        }
      }
      satisfaction_[level] = count;
      if (leaf) {
        bool feasible = true;
        for (std::size_t k = 0; k < horizon_; ++k) {
          feasible = feasible && satisfaction_[k] >= thresholds_[k];
        }
        result_.offer(total, indices_, satisfaction_, feasible);
      } else {
        expand(level + 1, 0, grid.size());
      }
    }
  }

  const ScenarioEnsemble<Nx> & ens_;
  const ScenarioProblem<Nx, Nu> & problem_;
  const StochasticModel<Nx, Nu, Ny> & model_;
  std::size_t n_s_;
  std::size_t horizon_;
  std::vector<std::vector<State>> states_;
  std::vector<std::vector<double>> costs_;
  std::vector<double> zeros_;
  std::vector<std::size_t> indices_;
  std::vector<std::size_t> satisfaction_;
  std::vector<std::size_t> thresholds_;
  SearchResult result_;
};

}  // namespace detail

/// Exhaustive minimization over all |U|^N grid sequences.
///
/// Returns the cheapest sequence meeting every chance constraint, earliest
/// in grid order on ties. When no sequence is feasible, returns the one
/// maximizing the smallest per-step satisfaction count (then cheapest, then
/// earliest) with `fallback_used` set. Work is split over the first control
/// across `problem.workers` threads; the result is independent of that
/// count.
template <std::size_t Nx, std::size_t Nu, std::size_t Ny>
ScenarioSolution<Nu> solve(
  const ScenarioEnsemble<Nx> & ens, const ScenarioProblem<Nx, Nu> & problem,
  const StochasticModel<Nx, Nu, Ny> & model)
{
  problem.validate();
  if (ens.horizon != problem.horizon || ens.size() != problem.scenarios) {
    throw ConfigError("ensemble was not built for this problem");
  }
  const std::size_t first_controls = problem.control_grid.size();
  const std::size_t workers = std::clamp<std::size_t>(problem.workers, 1, first_controls);
  std::vector<detail::SearchResult> partial(workers);
  parallel_for(first_controls, workers, [&](std::size_t begin, std::size_t end, std::size_t chunk) {
    detail::TreeSearch<Nx, Nu, Ny> search(ens, problem, model);
    partial[chunk] = search.run(begin, end);
  });
  detail::SearchResult best = std::move(partial.front());
  for (std::size_t c = 1; c < partial.size(); ++c) {
    best.merge(partial[c]);
  }

  ScenarioSolution<Nu> out;
  out.feasible = best.has_feasible;
  out.fallback_used = !best.has_feasible;
  out.grid_indices = best.has_feasible ? best.feasible_indices : best.fallback_indices;
  out.cost = best.has_feasible ? best.feasible_cost : best.fallback_cost;
  out.per_step_satisfaction = best.has_feasible ? best.feasible_satisfaction : best.fallback_satisfaction;
  out.sequence.reserve(out.grid_indices.size());
  for (std::size_t g : out.grid_indices) {
    out.sequence.push_back(problem.control_grid[g]);
  }
  return out;
}

/// Scalar grid lo, lo + spacing, ..., hi. (hi - lo) must be an integer
/// multiple of spacing (within 1e-9 relative).
inline std::vector<std::array<double, 1>> uniform_grid(double lo, double hi, double spacing)
{
  if (!(spacing > 0.0) || !(hi >= lo) || !std::isfinite(lo) || !std::isfinite(hi)) {
    throw ConfigError("control grid requires finite lo <= hi and spacing > 0");
  }
  const double steps = (hi - lo) / spacing;
  const double whole = std::round(steps);
  if (std::abs(steps - whole) > 1e-9 * std::max(1.0, whole)) {
    throw ConfigError("control grid span must be an integer multiple of the spacing");
  }
  std::vector<std::array<double, 1>> grid;
  const auto count = static_cast<std::size_t>(whole) + 1;
  grid.reserve(count);
  for (std::size_t i = 0; i < count; ++i) {
    grid.push_back({lo + spacing * static_cast<double>(i)});
  }
  grid.back()[0] = hi;
  return grid;
}

}  // namespace pmpc

#endif  // PMPC__SCENARIO_HPP_
