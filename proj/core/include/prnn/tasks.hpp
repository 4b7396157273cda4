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

// Synthetic sequence tasks used as desk-scale training workloads.

#ifndef PRNN_TASKS_HPP_
#define PRNN_TASKS_HPP_

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "prnn/network.hpp"
#include "prnn/rng.hpp"
#include "prnn/tensor.hpp"

namespace prnn::nn {

enum class TaskKind : std::uint8_t { kAdding = 0, kCharLm = 1 };

std::string_view to_string(TaskKind k) noexcept;
TaskKind parse_task(std::string_view name);

struct Batch {
  std::vector<DenseMatrix> inputs;  // seq_len matrices, batch x input_size
  DenseMatrix regression_targets;   // adding: batch x 1
  std::vector<std::vector<std::uint32_t>> class_targets;  // char-lm: [t][b]
};

// Adding problem: each step carries (value, marker) with values uniform in
// [-1, 1). Exactly two steps are marked, one in each half of the sequence;
// the target is the sum of the two marked values (mean 0, variance 2/3).
//
// Character LM: windows of seq_len + 1 characters from a text corpus, one-hot
// encoded; targets are the inputs shifted by one position.
class Task {
 public:
  static Task adding(std::size_t seq_len);
  static Task char_lm(std::size_t seq_len,
                      std::string corpus = std::string(embedded_corpus()));

  // Built-in text (under 100 KB) used when no corpus is supplied.
  static std::string_view embedded_corpus() noexcept;

  TaskKind kind() const noexcept { return kind_; }
  std::size_t seq_len() const noexcept { return seq_len_; }
  std::size_t input_size() const noexcept;
  std::size_t output_size() const noexcept;
  OutputMode output_mode() const noexcept;
  const std::string& vocabulary() const noexcept { return vocab_; }

  Batch generate_batch(Rng& rng, std::size_t batch_size) const;

  // Task loss and its gradient w.r.t. the network outputs.
  LossAndGrad<float> loss(std::span<const DenseMatrix> outputs,
                          const Batch& batch) const;

  // Variance of the regression target (adding problem only).
  static constexpr double kAddingTargetVariance = 2.0 / 3.0;

 private:
  Task(TaskKind kind, std::size_t seq_len) : kind_(kind), seq_len_(seq_len) {}

  TaskKind kind_;
  std::size_t seq_len_;
  std::string corpus_;
  std::string vocab_;                   // sorted distinct characters
  std::vector<std::uint32_t> encoded_;  // corpus as vocab indices
};

}  // namespace prnn::nn

#endif  // PRNN_TASKS_HPP_
