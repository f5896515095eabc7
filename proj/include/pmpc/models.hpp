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

#ifndef PMPC__MODELS_HPP_
#define PMPC__MODELS_HPP_

#include <array>
#include <cmath>
#include <functional>
#include <string>

#include "pmpc/densities.hpp"
#include "pmpc/errors.hpp"

namespace pmpc {

/** \brief Discrete-time stochastic state-space model.

    x_{t+1} = f(x_t, u_t, w_t),  y_t = h(x_t, v_t)

    with independent process noise w ~ process_noise (dimension Nx),
    measurement noise v ~ measurement_noise (dimension Ny) and initial
    state x_0 ~ initial_state. `likelihood(y, x)` is pdf(y | x); models
    supply it directly so the filter never needs to invert h.

    The maps must be pure. Models are immutable after construction and may
    be shared across threads.
 */
template <std::size_t Nx, std::size_t Nu = 1, std::size_t Ny = 1>
struct StochasticModel {
  static constexpr std::size_t state_dim = Nx;
  static constexpr std::size_t control_dim = Nu;
  static constexpr std::size_t output_dim = Ny;

  using State = std::array<double, Nx>;
  using Control = std::array<double, Nu>;
  using Output = std::array<double, Ny>;
  using ProcessNoise = std::array<double, Nx>;
  using MeasurementNoise = std::array<double, Ny>;

  using Transition = std::function<State(const State &, const Control &, const ProcessNoise &)>;
  using Measurement = std::function<Output(const State &, const MeasurementNoise &)>;
  using Likelihood = std::function<double(const Output &, const State &)>;

  std::string name;
  Transition transition;
  Measurement measurement;
  Likelihood likelihood;
  ProductDensity<Nx> process_noise;
  ProductDensity<Ny> measurement_noise;
  ProductDensity<Nx> initial_state;
};

using ScalarModel = StochasticModel<1, 1, 1>;

namespace detail {

template <std::size_t N>
bool all_finite(const std::array<double, N> & v)
{
  for (double x : v) {
    if (!std::isfinite(x)) {
      return false;
    }
  }
  return true;
}

template <std::size_t N>
std::string describe(const std::array<double, N> & v)
{
  return join_values(v.data(), N);
}

}  // namespace detail

/// f(x, u, w); throws NumericalError naming (x, u, w) on a non-finite result.
template <std::size_t Nx, std::size_t Nu, std::size_t Ny>
typename StochasticModel<Nx, Nu, Ny>::State step(
  const StochasticModel<Nx, Nu, Ny> & model, const std::array<double, Nx> & x,
  const std::array<double, Nu> & u, const std::array<double, Nx> & w)
{
  auto next = model.transition(x, u, w);
  if (!detail::all_finite(next)) {
    throw NumericalError(
      model.name + ": non-finite transition at x=" + detail::describe(x) +
      " u=" + detail::describe(u) + " w=" + detail::describe(w));
  }
  return next;
}

/// h(x, v); throws NumericalError on a non-finite output.
template <std::size_t Nx, std::size_t Nu, std::size_t Ny>
typename StochasticModel<Nx, Nu, Ny>::Output measure(
  const StochasticModel<Nx, Nu, Ny> & model, const std::array<double, Nx> & x,
  const std::array<double, Ny> & v)
{
  auto y = model.measurement(x, v);
  if (!detail::all_finite(y)) {
    throw NumericalError(
      model.name + ": non-finite measurement at x=" + detail::describe(x) +
      " v=" + detail::describe(v));
  }
  return y;
}

/// Measurement map and likelihood for y = g(x) + v.
/// The likelihood is exactly pdf(v_law, y - g(x)).
template <std::size_t Nx, std::size_t Nu, std::size_t Ny, typename OutputMap>
void set_additive_measurement(
  StochasticModel<Nx, Nu, Ny> & model, OutputMap g)
{
  using Model = StochasticModel<Nx, Nu, Ny>;
  model.measurement = [g](const typename Model::State & x, const typename Model::MeasurementNoise & v) {
    typename Model::Output y = g(x);
    for (std::size_t i = 0; i < Ny; ++i) {
      y[i] += v[i];
    }
    return y;
  };
  model.likelihood = [g, law = model.measurement_noise](
                       const typename Model::Output & y, const typename Model::State & x) {
    typename Model::Output residual = g(x);
    for (std::size_t i = 0; i < Ny; ++i) {
      residual[i] = y[i] - residual[i];
    }
    return pdf(law, residual);
  };
}

/// Noise and prior laws of a scalar model.
struct ScalarLaws {
  Density process_noise;
  Density measurement_noise;
  Density initial_state;
};

inline ScalarLaws paper_example_laws()
{
  return {Density::uniform(-2.0, 2.0), Density::gaussian(0.0, 5.0), Density::uniform(1.0, 2.0)};
}

/// Scalar, nominally unstable benchmark:
///   x+ = 1.5 x + atan((x - 1)^2) u + w,   y = x^3 - x + v
/// with w ~ U(-2, 2), v ~ N(0, 5), x0 ~ U(1, 2) unless overridden.
inline ScalarModel paper_example(const ScalarLaws & laws = paper_example_laws())
{
  ScalarModel model{
    "paper_example",
    [](const ScalarModel::State & x, const ScalarModel::Control & u, const ScalarModel::ProcessNoise & w) {
      const double offset = x[0] - 1.0;
      return ScalarModel::State{1.5 * x[0] + std::atan(offset * offset) * u[0] + w[0]};
    },
    {},
    {},
    {laws.process_noise},
    {laws.measurement_noise},
    {laws.initial_state},
  };
  set_additive_measurement(model, [](const ScalarModel::State & x) {
    return ScalarModel::Output{x[0] * x[0] * x[0] - x[0]};
  });
  return model;
}

struct LinearGaussianParams {
  double a = 0.9;
  double b = 1.0;
  double q = 1.0;
  double r = 1.0;
  double x0_mean = 0.0;
  double x0_var = 1.0;
};

/// x+ = a x + b u + w,  y = x + v,  w ~ N(0, q), v ~ N(0, r),
/// x0 ~ N(x0_mean, x0_var).
inline ScalarModel linear_gaussian(const LinearGaussianParams & p)
{
  if (!(p.q > 0.0) || !(p.r > 0.0) || !(p.x0_var > 0.0)) {
    throw ConfigError("linear_gaussian requires q > 0, r > 0 and x0_var > 0");
  }
  ScalarModel model{
    "linear_gaussian",
    [a = p.a, b = p.b](
      const ScalarModel::State & x, const ScalarModel::Control & u, const ScalarModel::ProcessNoise & w) {
      return ScalarModel::State{a * x[0] + b * u[0] + w[0]};
    },
    {},
    {},
    {Density::gaussian(0.0, p.q)},
    {Density::gaussian(0.0, p.r)},
    {Density::gaussian(p.x0_mean, p.x0_var)},
  };
  set_additive_measurement(model, [](const ScalarModel::State & x) { return ScalarModel::Output{x[0]}; });
  return model;
}

inline ScalarModel linear_gaussian(double a, double b, double q, double r, double x0_mean, double x0_var)
{
  return linear_gaussian(LinearGaussianParams{a, b, q, r, x0_mean, x0_var});
}

/// Noise-free x+ = a x + b u, y = x, x0 = x0 exactly. Point-mass laws make
/// the particle filter collapse onto the true state; used as an oracle model.
inline ScalarModel deterministic_linear(double a, double b, double x0)
{
  ScalarModel model{
    "deterministic_linear",
    [a, b](const ScalarModel::State & x, const ScalarModel::Control & u, const ScalarModel::ProcessNoise & w) {
      return ScalarModel::State{a * x[0] + b * u[0] + w[0]};
    },
    {},
    {},
    {Density::point_mass(0.0)},
    {Density::point_mass(0.0)},
    {Density::point_mass(x0)},
  };
  set_additive_measurement(model, [](const ScalarModel::State & x) { return ScalarModel::Output{x[0]}; });
  return model;
}

}  // namespace pmpc

#endif  // PMPC__MODELS_HPP_
