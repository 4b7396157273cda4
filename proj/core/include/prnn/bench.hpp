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

// Dense gemv vs CSR spmv timing harness for recurrent weight shapes.

#ifndef PRNN_BENCH_HPP_
#define PRNN_BENCH_HPP_

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "prnn/csr.hpp"
#include "prnn/tensor.hpp"

namespace prnn::sparse {

enum class BenchLayerType : std::uint8_t { kRnn, kGru };

std::string_view to_string(BenchLayerType t) noexcept;
BenchLayerType parse_bench_layer(std::string_view name);

struct BenchOptions {
  int repetitions = 30;  // timed, at least 30
  int warmup = 5;        // untimed, at least 5
  unsigned threads = 1;
  std::uint64_t seed = 1;
  // Each timed repetition loops the kernel until at least this long has
  // elapsed and reports the per-call mean, so small shapes stay resolvable.
  double min_rep_us = 50.0;
};

struct TimingStats {
  double median_us = 0.0;
  double q1_us = 0.0;
  double q3_us = 0.0;
  double iqr_us() const noexcept { return q3_us - q1_us; }
};

struct BenchRecord {
  std::size_t layer_size = 0;
  double sparsity = 0.0;
  BenchLayerType layer_type = BenchLayerType::kRnn;
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::size_t nnz = 0;
  TimingStats dense;
  TimingStats sparse;
  double speedup = 1.0;  // dense median / sparse median
};

// Median and quartiles (linear interpolation between order statistics).
TimingStats summarize(std::vector<double> samples_us);

// Random matrix with values uniform in [-1, 1), magnitude-pruned so that
// exactly round(sparsity * rows * cols) entries are zero.
DenseMatrix pruned_random_matrix(std::size_t rows, std::size_t cols,
                                 double sparsity, std::uint64_t seed);

// For each (size, sparsity): an RNN weight is size x size, a GRU weight is
// the fused gate matrix (3 * size) x size. Sparsity 0 yields the dense
// baseline row with speedup 1.
std::vector<BenchRecord> bench_matvec(const std::vector<std::size_t>& sizes,
                                      const std::vector<double>& sparsities,
                                      BenchLayerType layer_type,
                                      const BenchOptions& options = {});

}  // namespace prnn::sparse

#endif  // PRNN_BENCH_HPP_
