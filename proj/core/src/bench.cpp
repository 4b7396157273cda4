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

#include "prnn/bench.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numeric>

namespace prnn::sparse {

std::string_view to_string(BenchLayerType t) noexcept {
  return t == BenchLayerType::kRnn ? "RNN" : "GRU";
}

BenchLayerType parse_bench_layer(std::string_view name) {
  if (name == "rnn" || name == "RNN") return BenchLayerType::kRnn;
  if (name == "gru" || name == "GRU") return BenchLayerType::kGru;
  throw ParameterError("unknown layer type '" + std::string(name) + "'");
}

TimingStats summarize(std::vector<double> samples) {
  if (samples.empty()) throw ParameterError("summarize: no samples");
  std::sort(samples.begin(), samples.end());
  auto quantile = [&](double p) {
    const double pos = p * static_cast<double>(samples.size() - 1);
    const auto lo = static_cast<std::size_t>(std::floor(pos));
    const std::size_t hi = std::min(lo + 1, samples.size() - 1);
    const double frac = pos - static_cast<double>(lo);
    return samples[lo] + frac * (samples[hi] - samples[lo]);
  };
  return {quantile(0.5), quantile(0.25), quantile(0.75)};
}

DenseMatrix pruned_random_matrix(std::size_t rows, std::size_t cols,
                                 double sparsity, std::uint64_t seed) {
  if (!(sparsity >= 0.0 && sparsity <= 1.0)) {
    throw ParameterError("sparsity must lie in [0, 1]");
  }
  Rng rng(seed);
  DenseMatrix m = rand_uniform(rng, rows, cols, -1.0f, 1.0f);
  const std::size_t n = m.size();
  const auto zeros = static_cast<std::size_t>(
      std::llround(sparsity * static_cast<double>(n)));
  if (zeros == 0) return m;
  std::vector<std::uint32_t> order(n);
  std::iota(order.begin(), order.end(), 0u);
  auto values = m.values();
  std::stable_sort(order.begin(), order.end(),
                   [&](std::uint32_t a, std::uint32_t b) {
                     return std::fabs(values[a]) < std::fabs(values[b]);
                   });
  for (std::size_t k = 0; k < zeros; ++k) values[order[k]] = 0.0f;
  // A draw of exactly 0 would survive pruning and be dropped by CSR anyway.
  return m;
}

namespace {

using Clock = std::chrono::steady_clock;

template <typename Kernel>
TimingStats time_kernel(Kernel&& kernel, const BenchOptions& opt) {
  for (int i = 0; i < opt.warmup; ++i) kernel();
  // Calibrate the inner loop count on one call.
  const auto t0 = Clock::now();
  kernel();
  const double one =
      std::chrono::duration<double, std::micro>(Clock::now() - t0).count();
  const int inner = std::max(
      1, static_cast<int>(std::ceil(opt.min_rep_us / std::max(one, 1e-3))));
  std::vector<double> samples;
  samples.reserve(static_cast<std::size_t>(opt.repetitions));
  for (int rep = 0; rep < opt.repetitions; ++rep) {
    const auto start = Clock::now();
    for (int k = 0; k < inner; ++k) kernel();
    const double us =
        std::chrono::duration<double, std::micro>(Clock::now() - start).count();
    samples.push_back(us / inner);
  }
  return summarize(std::move(samples));
}

}  // namespace

std::vector<BenchRecord> bench_matvec(const std::vector<std::size_t>& sizes,
                                      const std::vector<double>& sparsities,
                                      BenchLayerType layer_type,
                                      const BenchOptions& options) {
  if (options.repetitions < 30 || options.warmup < 5) {
    throw ParameterError("benchmarks need >= 30 repetitions and >= 5 warmup");
  }
  std::vector<BenchRecord> out;
  for (std::size_t size : sizes) {
    if (size == 0) throw ParameterError("benchmark sizes must be >= 1");
    const std::size_t rows =
        layer_type == BenchLayerType::kGru ? 3 * size : size;
    const std::size_t cols = size;
    Rng xrng(options.seed ^ 0xA5A5A5A5ULL);
    DenseVector x(cols);
    for (float& v : x.values()) v = xrng.uniform(-1.0f, 1.0f);
    DenseVector y(rows);

    for (double s : sparsities) {
      const DenseMatrix m =
          pruned_random_matrix(rows, cols, s, options.seed + size);
      const CsrMatrix csr = to_csr(m);

      BenchRecord rec;
      rec.layer_size = size;
      rec.sparsity = s;
      rec.layer_type = layer_type;
      rec.rows = rows;
      rec.cols = cols;
      rec.nnz = csr.nnz();
      rec.dense = time_kernel(
          [&] { gemv_parallel(m, x.values(), y.values(), options.threads); },
          options);
      if (s == 0.0) {
        rec.sparse = rec.dense;
        rec.speedup = 1.0;
      } else {
        rec.sparse = time_kernel(
            [&] {
              spmv_parallel(csr, x.values(), y.values(), options.threads);
            },
            options);
        rec.speedup = rec.dense.median_us / rec.sparse.median_us;
      }
      out.push_back(rec);
    }
  }
  return out;
}

}  // namespace prnn::sparse
