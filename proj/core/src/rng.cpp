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

#include "prnn/rng.hpp"

#include <cmath>

namespace prnn {

float Rng::uniform(float lo, float hi) noexcept {
  const float v = lo + (hi - lo) * uniform_float();
  // Rounding of the affine map can land exactly on hi.
  return v < hi ? v : std::nextafter(hi, lo);
}

double Rng::uniform(double lo, double hi) noexcept {
  const double v = lo + (hi - lo) * uniform_double();
  return v < hi ? v : std::nextafter(hi, lo);
}

std::uint64_t Rng::uniform_index(std::uint64_t n) noexcept {
  __extension__ using u128 = unsigned __int128;
  u128 m = static_cast<u128>(next_u64()) * n;
  auto low = static_cast<std::uint64_t>(m);
  if (low < n) {
    const std::uint64_t threshold = (0 - n) % n;
    while (low < threshold) {
      m = static_cast<u128>(next_u64()) * n;
      low = static_cast<std::uint64_t>(m);
    }
  }
  return static_cast<std::uint64_t>(m >> 64);
}

}  // namespace prnn
