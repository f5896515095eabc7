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

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <cstring>
#include <map>
#include <vector>

#include "oracles.hpp"
#include "pmpc/models.hpp"
#include "pmpc/particle_filter.hpp"

using namespace pmpc;

namespace {

ParticleSet<1> scalar_set(std::vector<double> xs, std::vector<double> ws, ParticleKind kind)
{
  ParticleSet<1> set;
  for (double x : xs) {
    set.particles.push_back({x});
  }
  set.weights = std::move(ws);
  set.kind = kind;
  return set;
}

ParticleSet<1> uniform_set(std::vector<double> xs, ParticleKind kind)
{
  std::vector<ParticleSet<1>::State> states;
  for (double x : xs) {
    states.push_back({x});
  }
  return ParticleSet<1>::uniform(std::move(states), kind);
}

std::vector<double> random_weights(RngStream & rng, std::size_t n)
{
  std::vector<double> w(n);
  double total = 0.0;
  for (auto & x : w) {
    // heavy-tailed so some weights are large and some tiny
    x = std::pow(rng.uniform01(), 4.0);
    total += x;
  }
  for (auto & x : w) {
    x /= total;
  }
  return w;
}

std::vector<std::size_t> selection_counts(const ParticleSet<1> & in, const ParticleSet<1> & out)
{
  // particles are distinct values equal to their index
  std::vector<std::size_t> counts(in.size(), 0);
  for (const auto & p : out.particles) {
    counts[static_cast<std::size_t>(p[0])] += 1;
  }
  return counts;
}

std::vector<double> indices(std::size_t n)
{
  std::vector<double> xs(n);
  for (std::size_t i = 0; i < n; ++i) {
    xs[i] = static_cast<double>(i);
  }
  return xs;
}

}  // namespace

TEST(InitParticles, BenchmarkPriorSupport)
{
  RngStream rng(1, streams::kFilterInit);
  const auto set = init_particles(paper_example(), 4, rng);
  ASSERT_EQ(set.size(), 4u);
  EXPECT_EQ(set.kind, ParticleKind::Prior);
  for (std::size_t p = 0; p < 4; ++p) {
    EXPECT_GE(set.particles[p][0], 1.0);
    EXPECT_LE(set.particles[p][0], 2.0);
    EXPECT_EQ(set.weights[p], 0.25);
  }
}

TEST(InitParticles, PointMassPrior)
{
  RngStream rng(1, 1);
  const auto set = init_particles(deterministic_linear(1.0, 1.0, 1.5), 3, rng);
  for (const auto & p : set.particles) {
    EXPECT_EQ(p[0], 1.5);
  }
  EXPECT_THROW(init_particles(paper_example(), 0, rng), ConfigError);
}

TEST(MeasurementUpdate, IdenticalParticlesGiveUniformWeights)
{
  const auto prior = uniform_set({1.0, 1.0, 1.0}, ParticleKind::Prior);
  const auto out = measurement_update(prior, paper_example(), {3.7});
  EXPECT_EQ(out.kind, ParticleKind::Weighted);
  for (double w : out.weights) {
    EXPECT_NEAR(w, 1.0 / 3.0, 1e-15);
  }
}

TEST(MeasurementUpdate, FarParticleGetsNegligibleWeight)
{
  const auto model = linear_gaussian(1.0, 0.0, 1.0, 1.0, 0.0, 1.0);
  const auto out = measurement_update(uniform_set({0.0, 10.0}, ParticleKind::Prior), model, {0.0});
  EXPECT_NEAR(out.weights[0], 1.0, 1e-15);
  EXPECT_LT(out.weights[1], 1e-21);
  EXPECT_NEAR(out.weights[1] / out.weights[0], std::exp(-50.0), 1e-10 * std::exp(-50.0));
  EXPECT_EQ(out.particles, (std::vector<ParticleSet<1>::State>{{0.0}, {10.0}}));
}

TEST(MeasurementUpdate, RequiresPriorSet)
{
  const auto posterior = uniform_set({1.0}, ParticleKind::Posterior);
  EXPECT_THROW(measurement_update(posterior, paper_example(), {0.0}), ConfigError);
}

TEST(MeasurementUpdate, DegenerateLikelihoodKeepsPrior)
{
  const auto prior = uniform_set({1.0, 1.5, 2.0}, ParticleKind::Prior);
  const auto out = measurement_update(prior, paper_example(), {1e6});
  EXPECT_TRUE(out.degenerate);
  for (double w : out.weights) {
    EXPECT_DOUBLE_EQ(w, 1.0 / 3.0);
  }
  EXPECT_TRUE(stats(out).degenerate);
}

TEST(MeasurementUpdate, WeightsSumToOne)
{
  const auto model = paper_example();
  RngStream rng(3, 1);
  for (int trial = 0; trial < 50; ++trial) {
    const std::size_t n = 1 + rng.uniform_index(5000);
    auto prior = init_particles(model, n, rng);
    const double y = 20.0 * rng.uniform01() - 5.0;
    const auto out = measurement_update(prior, model, {y});
    if (out.degenerate) {
      continue;
    }
    double total = 0.0;
    for (double w : out.weights) {
      ASSERT_GE(w, 0.0);
      total += w;
    }
    ASSERT_NEAR(total, 1.0, 1e-12) << "n=" << n << " y=" << y;
  }
}

TEST(MeasurementUpdate, WorkerCountDoesNotChangeWeights)
{
  const auto model = paper_example();
  RngStream rng(8, 1);
  const auto prior = init_particles(model, 997, rng);
  const auto a = measurement_update(prior, model, {0.7}, 1);
  const auto b = measurement_update(prior, model, {0.7}, 4);
  ASSERT_EQ(a.weights.size(), b.weights.size());
  EXPECT_EQ(std::memcmp(a.weights.data(), b.weights.data(), a.weights.size() * sizeof(double)), 0);
}

TEST(Resample, AllMassOnOneParticle)
{
  RngStream rng(1, 1);
  const auto out = resample(scalar_set({7.0, 8.0, 9.0}, {1.0, 0.0, 0.0}, ParticleKind::Weighted), rng);
  EXPECT_EQ(out.kind, ParticleKind::Posterior);
  for (const auto & p : out.particles) {
    EXPECT_EQ(p[0], 7.0);
  }
  const auto last = resample(scalar_set({7.0, 8.0, 9.0}, {0.0, 0.0, 1.0}, ParticleKind::Weighted), rng);
  for (const auto & p : last.particles) {
    EXPECT_EQ(p[0], 9.0);
  }
}

TEST(Resample, UniformWeightsSelectEveryParticleOnce)
{
  RngStream rng(2, 1);
  for (std::size_t n : {1u, 2u, 3u, 7u, 10u, 100u, 1000u}) {
    for (int rep = 0; rep < 20; ++rep) {
      const auto in = uniform_set(indices(n), ParticleKind::Prior);
      auto weighted = in;
      weighted.kind = ParticleKind::Weighted;
      const auto counts = selection_counts(in, resample(weighted, rng));
      for (auto c : counts) {
        ASSERT_EQ(c, 1u) << "n=" << n;
      }
    }
  }
}

TEST(Resample, TwoEqualWeights)
{
  RngStream rng(3, 1);
  for (int rep = 0; rep < 100; ++rep) {
    const auto out = resample(scalar_set({0.0, 1.0}, {0.5, 0.5}, ParticleKind::Weighted), rng);
    ASSERT_EQ(out.particles[0][0], 0.0);
    ASSERT_EQ(out.particles[1][0], 1.0);
    EXPECT_EQ(out.weights, (std::vector<double>{0.5, 0.5}));
  }
}

TEST(Resample, CountsAreFloorOrCeilOfExpected)
{
  RngStream rng(4, 1);
  for (int trial = 0; trial < 500; ++trial) {
    const std::size_t n = 1 + rng.uniform_index(300);
    const auto in = scalar_set(indices(n), random_weights(rng, n), ParticleKind::Weighted);
    const auto out = resample(in, rng);
    ASSERT_EQ(out.size(), n);
    const auto counts = selection_counts(in, out);
    for (std::size_t p = 0; p < n; ++p) {
      const double expected = static_cast<double>(n) * in.weights[p];
      const auto lo = static_cast<std::size_t>(std::max(0.0, std::floor(expected - 1e-9)));
      const auto hi = static_cast<std::size_t>(std::ceil(expected + 1e-9));
      ASSERT_GE(counts[p], lo) << "trial " << trial << " p " << p;
      ASSERT_LE(counts[p], hi) << "trial " << trial << " p " << p;
    }
  }
}

TEST(Resample, SelectionFrequencyIsUnbiased)
{
  const std::vector<double> w = {0.05, 0.4, 0.15, 0.3, 0.1};
  const auto in = scalar_set(indices(w.size()), w, ParticleKind::Weighted);
  RngStream rng(5, 1);
  const int reps = 10000;
  std::vector<double> freq(w.size(), 0.0);
  for (int r = 0; r < reps; ++r) {
    const auto counts = selection_counts(in, resample(in, rng));
    for (std::size_t p = 0; p < w.size(); ++p) {
      freq[p] += static_cast<double>(counts[p]) / static_cast<double>(w.size() * reps);
    }
  }
  for (std::size_t p = 0; p < w.size(); ++p) {
    EXPECT_NEAR(freq[p], w[p], 0.02);
  }
}

TEST(TimeUpdate, DeterministicShift)
{
  RngStream rng(1, 1);
  const auto model = deterministic_linear(1.0, 1.0, 0.0);
  const auto out = time_update(uniform_set({0.0, 1.0}, ParticleKind::Posterior), model, {1.0}, rng);
  EXPECT_EQ(out.kind, ParticleKind::Prior);
  EXPECT_EQ(out.particles, (std::vector<ParticleSet<1>::State>{{1.0}, {2.0}}));
}

TEST(TimeUpdate, BenchmarkDynamicsWithFixedNoise)
{
  auto laws = paper_example_laws();
  laws.process_noise = Density::point_mass(0.3);
  RngStream rng(1, 1);
  const auto out = time_update(uniform_set({1.0}, ParticleKind::Posterior), paper_example(laws), {0.0}, rng);
  EXPECT_NEAR(out.particles[0][0], 1.8, 1e-15);
}

TEST(TimeUpdate, CountPreservedAndWorkerIndependent)
{
  const auto model = paper_example();
  RngStream init(2, 1);
  auto posterior = init_particles(model, 1001, init);
  posterior.kind = ParticleKind::Posterior;
  RngStream a(9, 9);
  RngStream b(9, 9);
  const auto one = time_update(posterior, model, {2.0}, a, 1);
  const auto many = time_update(posterior, model, {2.0}, b, 3);
  ASSERT_EQ(one.size(), 1001u);
  EXPECT_EQ(std::memcmp(one.particles.data(), many.particles.data(), 1001 * sizeof(double)), 0);
  EXPECT_THROW(time_update(one, model, {0.0}, a), ConfigError);
}

TEST(Stats, SimpleSets)
{
  const auto s = stats(uniform_set({1.0, 2.0, 3.0}, ParticleKind::Posterior));
  EXPECT_DOUBLE_EQ(s.mean[0], 2.0);
  EXPECT_NEAR(s.effective_sample_size, 3.0, 1e-12);

  const auto single = stats(uniform_set({5.0}, ParticleKind::Posterior));
  EXPECT_EQ(single.mean[0], 5.0);
  EXPECT_EQ(single.quantile_lo[0], 5.0);
  EXPECT_EQ(single.quantile_hi[0], 5.0);
  EXPECT_EQ(single.effective_sample_size, 1.0);

  const auto skewed = stats(scalar_set({1.0, 2.0, 3.0}, {0.5, 0.25, 0.25}, ParticleKind::Weighted));
  EXPECT_NEAR(skewed.effective_sample_size, 1.0 / 0.375, 1e-12);
}

TEST(Stats, QuantileMidpointConvention)
{
  // 100 equally weighted particles 0..99: midpoints (i + 0.5) / 100, so the
  // 2.5% and 97.5% quantiles land exactly on particles 2 and 97.
  const auto s = stats(uniform_set(indices(100), ParticleKind::Posterior));
  EXPECT_NEAR(s.quantile_lo[0], 2.0, 1e-9);
  EXPECT_NEAR(s.quantile_hi[0], 97.0, 1e-9);
  // interpolation between midpoints 0.25 and 0.75 of {0, 10}
  EXPECT_NEAR(weighted_quantile({{10.0, 0.5}, {0.0, 0.5}}, 0.5), 5.0, 1e-12);
  EXPECT_EQ(weighted_quantile({{10.0, 0.5}, {0.0, 0.5}}, 0.1), 0.0);
  EXPECT_EQ(weighted_quantile({{10.0, 0.5}, {0.0, 0.5}}, 0.9), 10.0);
  // zero-weight samples are ignored
  EXPECT_EQ(weighted_quantile({{-100.0, 0.0}, {1.0, 1.0}}, 0.025), 1.0);
}

TEST(Stats, QuantilesBracketMeanAndEssBounded)
{
  RngStream rng(6, 1);
  const auto g = Density::gaussian(1.0, 4.0);
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t n = 20 + rng.uniform_index(2000);
    std::vector<double> xs(n);
    for (auto & x : xs) {
      x = g.sample(rng);
    }
    const auto s = stats(scalar_set(xs, random_weights(rng, n), ParticleKind::Weighted));
    ASSERT_LE(s.quantile_lo[0], s.mean[0]);
    ASSERT_LE(s.mean[0], s.quantile_hi[0]);
    ASSERT_GE(s.effective_sample_size, 1.0);
    ASSERT_LE(s.effective_sample_size, static_cast<double>(n));
  }
}

TEST(ParticleFilter, TracksKalmanFilterOnLinearGaussianModel)
{
  const auto model = linear_gaussian(0.9, 1.0, 1.0, 1.0, 0.0, 1.0);
  RngStream truth(11, 1);
  RngStream init(11, streams::kFilterInit);
  RngStream resampling(11, streams::kResampling);
  RngStream noise(11, streams::kFilterProcessNoise);

  oracle::ScalarKalman kf{0.9, 1.0, 1.0, 1.0, 0.0, 1.0};
  double x = Density::gaussian(0.0, 1.0).sample(truth);
  auto prior = init_particles(model, 10000, init);
  double mean_err = 0.0;
  double var_err = 0.0;
  const int steps = 50;
  for (int t = 0; t < steps; ++t) {
    const double u = std::cos(0.2 * t);
    const double y = x + Density::gaussian(0.0, 1.0).sample(truth);
    kf.update(y);
    const auto weighted = measurement_update(prior, model, {y});
    double m = 0.0;
    for (std::size_t p = 0; p < weighted.size(); ++p) {
      m += weighted.weights[p] * weighted.particles[p][0];
    }
    double v = 0.0;
    for (std::size_t p = 0; p < weighted.size(); ++p) {
      v += weighted.weights[p] * (weighted.particles[p][0] - m) * (weighted.particles[p][0] - m);
    }
    mean_err += std::abs(m - kf.mean) / steps;
    var_err += std::abs(v - kf.variance) / kf.variance / steps;
    prior = time_update(resample(weighted, resampling), model, {u}, noise);
    kf.predict(u);
    x = 0.9 * x + u + Density::gaussian(0.0, 1.0).sample(truth);
  }
  EXPECT_LE(mean_err, 0.1);
  EXPECT_LE(var_err, 0.1);
}
