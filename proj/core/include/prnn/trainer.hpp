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

// Training loop for one experiment: dense, gradually pruned, or hard pruned
// once at a fixed iteration.

#ifndef PRNN_TRAINER_HPP_
#define PRNN_TRAINER_HPP_

#include <cstdint>
#include <string>
#include <vector>

#include "prnn/config.hpp"
#include "prnn/network.hpp"
#include "prnn/pruning.hpp"
#include "prnn/tasks.hpp"

namespace prnn::harness {

struct MetricsRecord {
  long iteration = 0;  // completed iterations
  double epoch = 0.0;  // iteration / iters_per_epoch
  double train_loss = 0.0;  // mean over the iterations since the last row
  double val_loss = 0.0;    // most recent validation pass
  prune::EpsilonSet eps{};
  double sparsity_overall = 0.0;
  std::size_t params_remaining = 0;
  double wall_seconds = 0.0;
  std::vector<double> layer_sparsity;  // one per SparsityReport layer
};

// Snapshot taken after iteration `iteration` whenever it is a multiple of
// the logging frequency.
struct ScheduleRow {
  long iteration = 0;
  prune::EpsilonSet eps{};
  std::size_t pruned_count = 0;   // currently masked weights
  std::size_t regrown_count = 0;  // cumulative
  double sparsity_overall = 0.0;
};

struct PruningPlan {
  PruneMode mode = PruneMode::kNone;
  prune::ScheduleSet schedules{};  // gradual
  long hard_prune_itr = 0;         // hard: completed iterations before pruning
  std::size_t hard_keep = 0;       // hard: prunable weights kept
};

struct TrainResult {
  nn::Network network;
  std::vector<std::string> layer_names;
  std::vector<MetricsRecord> metrics;
  std::vector<ScheduleRow> schedule;
  double initial_val_loss = 0.0;
  double final_val_loss = 0.0;
  prune::SparsityReport report;
  std::size_t final_kept_prunable = 0;
  long log_freq = prune::kDefaultFreq;
};

nn::Task make_task(const TaskConfig& config);
nn::NetworkSpec make_network_spec(const ExperimentConfig& config,
                                  const nn::Task& task);

// Deterministic in (config, plan). The model is initialised, the training
// stream drawn and the validation set built from independent substreams of
// config.seed, so runs that differ only in `plan` see identical data.
// Throws DivergenceError on a non-finite training loss.
TrainResult train(const ExperimentConfig& config, const PruningPlan& plan);

// Mean loss over the fixed validation set of `config`.
double validation_loss(const nn::Network& net, const nn::Task& task,
                       const std::vector<nn::Batch>& validation);
std::vector<nn::Batch> make_validation_set(const ExperimentConfig& config,
                                           const nn::Task& task);

}  // namespace prnn::harness

#endif  // PRNN_TRAINER_HPP_
