// Copyright 2026 The prnn Authors.
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

// SplitMix64 pseudorandom generator.
//
// The stream is defined entirely by 64-bit integer arithmetic, so a given seed
// yields the same sequence on every platform and compiler:
//
//   state += 0x9E3779B97F4A7C15
//   z = state
//   z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9
//   z = (z ^ (z >> 27)) * 0x94D049BB133111EB
//   return z ^ (z >> 31)
//
// Floating-point draws take the top 24 (float) or 53 (double) bits of the
// next output and scale by 2^-24 / 2^-53, giving values in [0, 1).
// split() derives an independent child stream by seeding a new generator from
// the next output of this one.

#ifndef PRNN_RNG_HPP_
#define PRNN_RNG_HPP_

#include <cstdint>

namespace prnn {

class Rng {
 public:
  static constexpr std::uint64_t kGoldenGamma = 0x9E3779B97F4A7C15ULL;

  explicit Rng(std::uint64_t seed) : seed_(seed), state_(seed) {}

  std::uint64_t seed() const noexcept { return seed_; }

  std::uint64_t next_u64() noexcept {
    std::uint64_t z = (state_ += kGoldenGamma);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  }

  float uniform_float() noexcept {
    return static_cast<float>(next_u64() >> 40) * 0x1.0p-24f;
  }
  double uniform_double() noexcept {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
  }

  // Uniform in [lo, hi). Requires lo < hi.
  float uniform(float lo, float hi) noexcept;
  double uniform(double lo, double hi) noexcept;

  // Uniform integer in [0, n). Requires n > 0. Uses Lemire's multiply-shift
  // with rejection so the result is unbiased.
  std::uint64_t uniform_index(std::uint64_t n) noexcept;

  Rng split() noexcept { return Rng(next_u64()); }

 private:
  std::uint64_t seed_;
  std::uint64_t state_;
};

}  // namespace prnn

#endif  // PRNN_RNG_HPP_
