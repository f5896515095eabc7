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

#ifndef PMPC__PARTICLE_FILTER_HPP_
#define PMPC__PARTICLE_FILTER_HPP_

#include <algorithm>
#include <array>
#include <cmath>
#include <numeric>
#include <string>
#include <vector>

#include "pmpc/densities.hpp"
#include "pmpc/errors.hpp"
#include "pmpc/models.hpp"
#include "pmpc/parallel.hpp"
#include "pmpc/rng.hpp"

namespace pmpc {

/// Prior: a-priori particles x-, uniform weights.
/// Weighted: prior particles carrying normalized likelihood weights.
/// Posterior: resampled particles x+, uniform weights.
enum class ParticleKind { Prior, Weighted, Posterior };

inline const char * to_string(ParticleKind kind)
{
  switch (kind) {
    case ParticleKind::Prior:
      return "prior";
    case ParticleKind::Weighted:
      return "weighted";
    case ParticleKind::Posterior:
      return "posterior";
  }
  return "unknown";
}

/// Weighted particle approximation of the information state.
template <std::size_t Nx>
struct ParticleSet {
  using State = std::array<double, Nx>;

  std::vector<State> particles;
  std::vector<double> weights;
  ParticleKind kind = ParticleKind::Prior;
  /// Set by measurement_update when every likelihood underflowed and the
  /// prior weights were kept.
  bool degenerate = false;

  std::size_t size() const noexcept { return particles.size(); }

  static ParticleSet uniform(std::vector<State> particles, ParticleKind kind)
  {
    ParticleSet set;
    const double w = 1.0 / static_cast<double>(particles.size());
    set.weights.assign(particles.size(), w);
    set.particles = std::move(particles);
    set.kind = kind;
    return set;
  }
};

template <std::size_t Nx>
struct FilterStats {
  std::array<double, Nx> mean{};
  std::array<double, Nx> quantile_lo{};  ///< 2.5% weighted quantile.
  std::array<double, Nx> quantile_hi{};  ///< 97.5% weighted quantile.
  double effective_sample_size = 0.0;
  bool degenerate = false;
};

/// Raw likelihoods at or below this are treated as zero.
inline constexpr double kLikelihoodFloor = 1e-300;

namespace detail {

inline void require_kind(ParticleKind actual, ParticleKind expected, const char * op)
{
  if (actual != expected) {
    throw ConfigError(
      std::string(op) + " expects a " + to_string(expected) + " particle set, got " + to_string(actual));
  }
}

/// Neumaier-compensated sum.
inline double compensated_sum(const std::vector<double> & values)
{
  double sum = 0.0;
  double carry = 0.0;
  for (double v : values) {
    const double t = sum + v;
    if (std::abs(sum) >= std::abs(v)) {
      carry += (sum - t) + v;
    } else {
      carry += (v - t) + sum;
    }
    sum = t;
  }
  return sum + carry;
}

}  // namespace detail

/// Draws n_p i.i.d. particles from the model's initial-state law.
template <std::size_t Nx, std::size_t Nu, std::size_t Ny>
ParticleSet<Nx> init_particles(const StochasticModel<Nx, Nu, Ny> & model, std::size_t n_p, RngStream & rng)
{
  if (n_p == 0) {
    throw ConfigError("particle count must be at least 1");
  }
  std::vector<std::array<double, Nx>> particles;
  particles.reserve(n_p);
  for (std::size_t p = 0; p < n_p; ++p) {
    particles.push_back(sample(model.initial_state, rng));
  }
  return ParticleSet<Nx>::uniform(std::move(particles), ParticleKind::Prior);
}

/// Weights each prior particle by pdf(y | x) and normalizes.
///
/// If every raw likelihood is at or below kLikelihoodFloor the prior
/// weights are kept and `degenerate` is set on the result.
template <std::size_t Nx, std::size_t Nu, std::size_t Ny>
ParticleSet<Nx> measurement_update(
  const ParticleSet<Nx> & prior, const StochasticModel<Nx, Nu, Ny> & model,
  const std::array<double, Ny> & y, std::size_t workers = 1)
{
  detail::require_kind(prior.kind, ParticleKind::Prior, "measurement_update");
  const std::size_t n = prior.size();
  std::vector<double> raw(n);
  parallel_for(n, workers, [&](std::size_t begin, std::size_t end, std::size_t) {
    for (std::size_t p = begin; p < end; ++p) {
      const double q = model.likelihood(y, prior.particles[p]);
      if (!std::isfinite(q) || q < 0.0) {
        throw NumericalError(
          model.name + ": invalid likelihood " + std::to_string(q) + " at particle " + std::to_string(p));
      }
      raw[p] = q;
    }
  });

  ParticleSet<Nx> out;
  out.particles = prior.particles;
  out.kind = ParticleKind::Weighted;

  const bool any_alive = std::any_of(raw.begin(), raw.end(), [](double q) { return q > kLikelihoodFloor; });
  if (!any_alive) {
    out.weights.assign(n, 1.0 / static_cast<double>(n));
    out.degenerate = true;
    return out;
  }
  const double total = detail::compensated_sum(raw);
  for (double & q : raw) {
    q /= total;
  }
  out.weights = std::move(raw);
  return out;
}

/// Systematic resampling: one uniform offset u, pointers (i + u) / N.
/// Particle p is selected floor(N q_p) or ceil(N q_p) times; output is
/// ordered by parent index.
template <std::size_t Nx>
ParticleSet<Nx> resample(const ParticleSet<Nx> & weighted, RngStream & rng)
{
  detail::require_kind(weighted.kind, ParticleKind::Weighted, "resample");
  const std::size_t n = weighted.size();
  const double scale = static_cast<double>(n);
  const double offset = rng.uniform01();

  std::vector<std::array<double, Nx>> selected;
  selected.reserve(n);
  std::size_t parent = 0;
  double cumulative = scale * weighted.weights[0];
  for (std::size_t i = 0; i < n; ++i) {
    const double pointer = static_cast<double>(i) + offset;
    while (cumulative <= pointer && parent + 1 < n) {
      ++parent;
      cumulative += scale * weighted.weights[parent];
    }
    selected.push_back(weighted.particles[parent]);
  }
  return ParticleSet<Nx>::uniform(std::move(selected), ParticleKind::Posterior);
}

/// Propagates every posterior particle through f with its own process-noise
/// draw. All draws are taken from `rng` in particle order before the
/// (possibly parallel) propagation, so results do not depend on `workers`.
template <std::size_t Nx, std::size_t Nu, std::size_t Ny>
ParticleSet<Nx> time_update(
  const ParticleSet<Nx> & posterior, const StochasticModel<Nx, Nu, Ny> & model,
  const std::array<double, Nu> & u, RngStream & rng, std::size_t workers = 1)
{
  detail::require_kind(posterior.kind, ParticleKind::Posterior, "time_update");
  const std::size_t n = posterior.size();
  std::vector<std::array<double, Nx>> noise(n);
  for (auto & w : noise) {
    w = sample(model.process_noise, rng);
  }
  std::vector<std::array<double, Nx>> next(n);
  parallel_for(n, workers, [&](std::size_t begin, std::size_t end, std::size_t) {
    for (std::size_t p = begin; p < end; ++p) {
      next[p] = step(model, posterior.particles[p], u, noise[p]);
    }
  });
  return ParticleSet<Nx>::uniform(std::move(next), ParticleKind::Prior);
}

/// Weighted quantile of scalar samples.
///
/// Samples are sorted and each is placed at the midpoint of its weight
/// interval, c_i = sum_{j<i} w_j + w_i / 2. The quantile is linearly
/// interpolated between neighbouring midpoints and clamped to the extreme
/// samples outside [c_0, c_last]. Zero-weight samples are ignored.
inline double weighted_quantile(std::vector<std::pair<double, double>> value_weight, double level)
{
  std::erase_if(value_weight, [](const auto & vw) { return !(vw.second > 0.0); });
  if (value_weight.empty()) {
    throw ConfigError("weighted_quantile needs at least one positive weight");
  }
  std::sort(value_weight.begin(), value_weight.end(), [](const auto & a, const auto & b) {
    return a.first < b.first;
  });
  double total = 0.0;
  for (const auto & vw : value_weight) {
    total += vw.second;
  }
  std::vector<double> midpoints(value_weight.size());
  double before = 0.0;
  for (std::size_t i = 0; i < value_weight.size(); ++i) {
    const double w = value_weight[i].second / total;
    midpoints[i] = before + 0.5 * w;
    before += w;
  }
  if (level <= midpoints.front()) {
    return value_weight.front().first;
  }
  if (level >= midpoints.back()) {
    return value_weight.back().first;
  }
  const auto upper = std::upper_bound(midpoints.begin(), midpoints.end(), level);
  const std::size_t hi = static_cast<std::size_t>(upper - midpoints.begin());
  const std::size_t lo = hi - 1;
  const double frac = (level - midpoints[lo]) / (midpoints[hi] - midpoints[lo]);
  return value_weight[lo].first + frac * (value_weight[hi].first - value_weight[lo].first);
}

/// Weighted mean, 2.5% / 97.5% quantiles per component and ESS = 1 / sum w^2.
template <std::size_t Nx>
FilterStats<Nx> stats(const ParticleSet<Nx> & set)
{
  if (set.size() == 0) {
    throw ConfigError("stats of an empty particle set");
  }
  const double total = detail::compensated_sum(set.weights);
  FilterStats<Nx> out;
  out.degenerate = set.degenerate;

  double sum_sq = 0.0;
  for (std::size_t p = 0; p < set.size(); ++p) {
    const double w = set.weights[p] / total;
    sum_sq += w * w;
    for (std::size_t i = 0; i < Nx; ++i) {
      out.mean[i] += w * set.particles[p][i];
    }
  }
  out.effective_sample_size = std::clamp(1.0 / sum_sq, 1.0, static_cast<double>(set.size()));

  std::vector<std::pair<double, double>> column(set.size());
  for (std::size_t i = 0; i < Nx; ++i) {
    for (std::size_t p = 0; p < set.size(); ++p) {
      column[p] = {set.particles[p][i], set.weights[p]};
    }
    out.quantile_lo[i] = weighted_quantile(column, 0.025);
    out.quantile_hi[i] = weighted_quantile(column, 0.975);
  }
  return out;
}

}  // namespace pmpc

#endif  // PMPC__PARTICLE_FILTER_HPP_
