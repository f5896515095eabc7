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

#ifndef PMPC__DENSITIES_HPP_
#define PMPC__DENSITIES_HPP_

#include <array>
#include <cmath>
#include <numbers>
#include <string>
#include <type_traits>
#include <utility>
#include <variant>

#include "pmpc/errors.hpp"
#include "pmpc/rng.hpp"

namespace pmpc {

struct Uniform {
  double lo;
  double hi;
  bool operator==(const Uniform &) const = default;
};

struct Gaussian {
  double mean;
  double variance;
  bool operator==(const Gaussian &) const = default;
};

struct PointMass {
  double value;
  bool operator==(const PointMass &) const = default;
};

/// Scalar probability law. Validated on construction, immutable afterwards.
class Density {
public:
  using Law = std::variant<Uniform, Gaussian, PointMass>;

  /// Half-width of the indicator window used as the point-mass "density".
  static constexpr double kPointMassTolerance = 1e-12;

  explicit Density(Law law) : law_(law) { validate(); }

  static Density uniform(double lo, double hi) { return Density(Uniform{lo, hi}); }
  static Density gaussian(double mean, double variance) { return Density(Gaussian{mean, variance}); }
  static Density point_mass(double value) { return Density(PointMass{value}); }

  const Law & law() const noexcept { return law_; }

  template <typename T>
  bool is() const noexcept
  {
    return std::holds_alternative<T>(law_);
  }

  /// One draw; consumes one word of `rng` for Uniform, two for Gaussian
  /// (Box-Muller, cosine branch only) and none for PointMass.
  double sample(RngStream & rng) const
  {
    return std::visit(
      [&rng](const auto & d) -> double {
        using T = std::decay_t<decltype(d)>;
        if constexpr (std::is_same_v<T, Uniform>) {
          return d.lo + (d.hi - d.lo) * rng.uniform01();
        } else if constexpr (std::is_same_v<T, Gaussian>) {
          const double u1 = 1.0 - rng.uniform01();
          const double u2 = rng.uniform01();
          const double radius = std::sqrt(-2.0 * std::log(u1));
          return d.mean + std::sqrt(d.variance) * radius * std::cos(2.0 * std::numbers::pi * u2);
        } else {
          return d.value;
        }
      },
      law_);
  }

  /// Density value at `x`. PointMass yields 1 inside a 1e-12 window around
  /// its value and 0 elsewhere.
  double pdf(double x) const
  {
    return std::visit(
      [x](const auto & d) -> double {
        using T = std::decay_t<decltype(d)>;
        if constexpr (std::is_same_v<T, Uniform>) {
          return (x >= d.lo && x <= d.hi) ? 1.0 / (d.hi - d.lo) : 0.0;
        } else if constexpr (std::is_same_v<T, Gaussian>) {
          const double z = x - d.mean;
          return std::exp(-0.5 * z * z / d.variance) / std::sqrt(2.0 * std::numbers::pi * d.variance);
        } else {
          return std::abs(x - d.value) <= kPointMassTolerance ? 1.0 : 0.0;
        }
      },
      law_);
  }

  double mean() const
  {
    return std::visit(
      [](const auto & d) -> double {
        using T = std::decay_t<decltype(d)>;
        if constexpr (std::is_same_v<T, Uniform>) {
          return 0.5 * (d.lo + d.hi);
        } else if constexpr (std::is_same_v<T, Gaussian>) {
          return d.mean;
        } else {
          return d.value;
        }
      },
      law_);
  }

  double variance() const
  {
    return std::visit(
      [](const auto & d) -> double {
        using T = std::decay_t<decltype(d)>;
        if constexpr (std::is_same_v<T, Uniform>) {
          return (d.hi - d.lo) * (d.hi - d.lo) / 12.0;
        } else if constexpr (std::is_same_v<T, Gaussian>) {
          return d.variance;
        } else {
          return 0.0;
        }
      },
      law_);
  }

  bool operator==(const Density &) const = default;

private:
  void validate() const
  {
    if (const auto * u = std::get_if<Uniform>(&law_)) {
      if (!std::isfinite(u->lo) || !std::isfinite(u->hi) || !(u->lo < u->hi)) {
        throw ConfigError(
          "uniform density requires finite lo < hi, got lo=" + std::to_string(u->lo) +
          " hi=" + std::to_string(u->hi));
      }
    } else if (const auto * g = std::get_if<Gaussian>(&law_)) {
      if (!std::isfinite(g->mean) || !std::isfinite(g->variance) || !(g->variance > 0.0)) {
        throw ConfigError(
          "gaussian density requires finite mean and variance > 0, got variance=" +
          std::to_string(g->variance));
      }
    } else if (const auto * p = std::get_if<PointMass>(&law_)) {
      if (!std::isfinite(p->value)) {
        throw ConfigError("point mass requires a finite value");
      }
    }
  }

  Law law_;
};

/// Vector law made of independent scalar components.
template <std::size_t N>
using ProductDensity = std::array<Density, N>;

template <std::size_t N>
std::array<double, N> sample(const ProductDensity<N> & law, RngStream & rng)
{
  std::array<double, N> out{};
  for (std::size_t i = 0; i < N; ++i) {
    out[i] = law[i].sample(rng);
  }
  return out;
}

template <std::size_t N>
double pdf(const ProductDensity<N> & law, const std::array<double, N> & x)
{
  double value = 1.0;
  for (std::size_t i = 0; i < N; ++i) {
    value *= law[i].pdf(x[i]);
  }
  return value;
}

/// Same scalar law in every component.
template <std::size_t N>
ProductDensity<N> iid(const Density & d)
{
  return [&d]<std::size_t... I>(std::index_sequence<I...>) {
    return ProductDensity<N>{((void)I, d)...};
  }(std::make_index_sequence<N>{});
}

}  // namespace pmpc

#endif  // PMPC__DENSITIES_HPP_
