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

#include "prnn/tensor.hpp"

namespace prnn {

DenseMatrix rand_uniform(Rng& rng, std::size_t rows, std::size_t cols,
                         float lo, float hi) {
  if (!(lo < hi)) {
    throw ParameterError("rand_uniform: require lo < hi, got lo=" +
                         std::to_string(lo) + " hi=" + std::to_string(hi));
  }
  DenseMatrix m(rows, cols);
  for (float& v : m.values()) v = rng.uniform(lo, hi);
  return m;
}

}  // namespace prnn
