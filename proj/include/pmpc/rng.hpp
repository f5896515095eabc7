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

#ifndef PMPC__RNG_HPP_
#define PMPC__RNG_HPP_

#include <array>
#include <cstdint>
#include <limits>

namespace pmpc {

/// Philox4x32-10 counter-based block cipher (Salmon et al., Random123).
/// The output is fully specified by integer arithmetic, so every platform
/// produces the same bits for the same counter and key.
struct Philox4x32 {
  using Counter = std::array<std::uint32_t, 4>;
  using Key = std::array<std::uint32_t, 2>;

  static constexpr Counter encrypt(Counter ctr, Key key) noexcept
  {
    for (int round = 0; round < 10; ++round) {
      if (round != 0) {
        key[0] += kWeyl0;
        key[1] += kWeyl1;
      }
      const std::uint64_t p0 = std::uint64_t{kMul0} * ctr[0];
      const std::uint64_t p1 = std::uint64_t{kMul1} * ctr[2];
      const auto hi0 = static_cast<std::uint32_t>(p0 >> 32);
      const auto lo0 = static_cast<std::uint32_t>(p0);
      const auto hi1 = static_cast<std::uint32_t>(p1 >> 32);
      const auto lo1 = static_cast<std::uint32_t>(p1);
      ctr = {hi1 ^ ctr[1] ^ key[0], lo1, hi0 ^ ctr[3] ^ key[1], lo0};
    }
    return ctr;
  }

private:
  static constexpr std::uint32_t kMul0 = 0xD2511F53u;
  static constexpr std::uint32_t kMul1 = 0xCD9E8D57u;
  static constexpr std::uint32_t kWeyl0 = 0x9E3779B9u;
  static constexpr std::uint32_t kWeyl1 = 0xBB67AE85u;
};

/// Well-known stream ids. Each consumer of randomness owns one stream so
/// that changing how much one consumer draws never shifts another's draws.
namespace streams {
inline constexpr std::uint64_t kTrueInitialState = 1;
inline constexpr std::uint64_t kTrueProcessNoise = 2;
inline constexpr std::uint64_t kTrueMeasurementNoise = 3;
inline constexpr std::uint64_t kFilterInit = 16;
inline constexpr std::uint64_t kFilterProcessNoise = 17;
inline constexpr std::uint64_t kResampling = 18;
inline constexpr std::uint64_t kScenarios = 19;
}  // namespace streams

/// Deterministic random stream keyed by (seed, stream id).
///
/// Draw i of a stream is half of Philox4x32-10 applied to the counter
/// (i / 2, stream id) under the key `seed`. Satisfies
/// UniformRandomBitGenerator, but the library only uses its own
/// transforms (`uniform01`, `Density::sample`) since the standard
/// distributions are implementation-defined.
class RngStream {
public:
  using result_type = std::uint64_t;

  RngStream(std::uint64_t seed, std::uint64_t stream_id) noexcept
  : seed_(seed), stream_id_(stream_id)
  {
  }

  std::uint64_t seed() const noexcept { return seed_; }
  std::uint64_t stream_id() const noexcept { return stream_id_; }
  /// Number of 64-bit words drawn so far.
  std::uint64_t position() const noexcept { return position_; }

  std::uint64_t next_u64() noexcept
  {
    const std::uint64_t block = position_ >> 1;
    if ((position_ & 1u) == 0) {
      const Philox4x32::Counter ctr = {
        static_cast<std::uint32_t>(block), static_cast<std::uint32_t>(block >> 32),
        static_cast<std::uint32_t>(stream_id_), static_cast<std::uint32_t>(stream_id_ >> 32)};
      const Philox4x32::Key key = {
        static_cast<std::uint32_t>(seed_), static_cast<std::uint32_t>(seed_ >> 32)};
      buffer_ = Philox4x32::encrypt(ctr, key);
    }
    const std::size_t half = (position_ & 1u) * 2;
    ++position_;
    return (std::uint64_t{buffer_[half + 1]} << 32) | buffer_[half];
  }

  /// Uniform double on [0, 1) with 53 random bits.
  double uniform01() noexcept
  {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
  }

  /// Uniform index in [0, n) by multiply-shift; n must be positive.
  std::size_t uniform_index(std::size_t n) noexcept
  {
    const auto wide = static_cast<unsigned __int128>(next_u64()) * n;
    return static_cast<std::size_t>(wide >> 64);
  }

  result_type operator()() noexcept { return next_u64(); }
  static constexpr result_type min() noexcept { return 0; }
  static constexpr result_type max() noexcept { return std::numeric_limits<result_type>::max(); }

private:
  std::uint64_t seed_;
  std::uint64_t stream_id_;
  std::uint64_t position_ = 0;
  Philox4x32::Counter buffer_{};
};

}  // namespace pmpc

#endif  // PMPC__RNG_HPP_
