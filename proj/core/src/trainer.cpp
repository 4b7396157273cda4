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

#include "prnn/trainer.hpp"

#include <chrono>
#include <cmath>

#include "prnn/optimizer.hpp"

namespace prnn::harness {

namespace {

constexpr std::size_t kValidationChunk = 256;

struct Streams {
  Rng init;
  Rng data;
  Rng validation;
};

Streams make_streams(std::uint64_t seed) {
  Rng root(seed);
  Rng init = root.split();
  Rng data = root.split();
  Rng validation = root.split();
  return {init, data, validation};
}

long logging_frequency(const PruningPlan& plan) {
  for (const auto& s : plan.schedules) {
    if (plan.mode == PruneMode::kGradual && s) return s->freq;
  }
  return prune::kDefaultFreq;
}

}  // namespace

nn::Task make_task(const TaskConfig& config) {
  return config.kind == nn::TaskKind::kAdding
             ? nn::Task::adding(config.seq_len)
             : nn::Task::char_lm(config.seq_len);
}

nn::NetworkSpec make_network_spec(const ExperimentConfig& config,
                                  const nn::Task& task) {
  nn::NetworkSpec spec;
  spec.cell = config.model.cell;
  spec.activation = config.model.activation;
  spec.input_size = task.input_size();
  spec.hidden_size = config.model.hidden;
  spec.depth = config.model.depth;
  spec.output_size = task.output_size();
  spec.output_mode = task.output_mode();
  return spec;
}

std::vector<nn::Batch> make_validation_set(const ExperimentConfig& config,
                                           const nn::Task& task) {
  Rng rng = make_streams(config.seed).validation;
  std::vector<nn::Batch> out;
  for (std::size_t done = 0; done < config.task.val_size;) {
    const std::size_t n =
        std::min(kValidationChunk, config.task.val_size - done);
    out.push_back(task.generate_batch(rng, n));
    done += n;
  }
  return out;
}

double validation_loss(const nn::Network& net, const nn::Task& task,
                       const std::vector<nn::Batch>& validation) {
  double sum = 0.0;
  std::size_t count = 0;
  for (const auto& b : validation) {
    const auto fwd = nn::forward<float>(net, b.inputs);
    const auto lg = task.loss(fwd.outputs, b);
    const std::size_t n = b.inputs.front().rows();
    sum += static_cast<double>(lg.loss) * static_cast<double>(n);
    count += n;
  }
  return sum / static_cast<double>(count);
}

TrainResult train(const ExperimentConfig& config, const PruningPlan& plan) {
  config.validate();
  const nn::Task task = make_task(config.task);
  Streams streams = make_streams(config.seed);
  const auto validation = make_validation_set(config, task);

  TrainResult result;
  result.network = nn::init_network(make_network_spec(config, task),
                                    streams.init);
  nn::Network& net = result.network;
  result.log_freq = logging_frequency(plan);
  const long freq = result.log_freq;
  const long total = config.total_iters();
  const long ipe = config.iters_per_epoch;

  if (plan.mode == PruneMode::kHard &&
      (plan.hard_prune_itr < 0 || plan.hard_prune_itr >= total)) {
    throw ParameterError("hard prune iteration " +
                         std::to_string(plan.hard_prune_itr) +
                         " outside training range [0, " +
                         std::to_string(total) + ")");
  }

  prune::MaskedParameters masked = prune::attach_masks(net.mutable_parameters());
  prune::GradualPruner pruner(plan.mode == PruneMode::kGradual
                                  ? plan.schedules
                                  : prune::ScheduleSet{});
  bool hard_done = false;
  auto do_hard_prune = [&] {
    prune::hard_prune(masked, plan.hard_keep);
    prune::apply_masks(masked);
    hard_done = true;
  };
  if (plan.mode == PruneMode::kHard && plan.hard_prune_itr == 0) {
    do_hard_prune();
  }

  {
    const auto r = prune::sparsity_report(masked);
    for (const auto& l : r.layers) result.layer_names.push_back(l.name);
  }

  nn::NesterovSgd opt(config.optim.learning_rate, config.optim.momentum);
  const auto t0 = std::chrono::steady_clock::now();
  double val = validation_loss(net, task, validation);
  result.initial_val_loss = val;
  double loss_sum = 0.0;
  long loss_count = 0;
  std::size_t regrown = 0;
  long last_finite = -1;

  auto current_eps = [&] {
    return plan.mode == PruneMode::kGradual ? pruner.state().epsilons()
                                            : prune::EpsilonSet{};
  };

  for (long i = 0; i < total; ++i) {
    const nn::Batch batch = task.generate_batch(streams.data,
                                                config.task.batch_size);
    const auto fwd = nn::forward<float>(net, batch.inputs);
    const auto lg = task.loss(fwd.outputs, batch);
    if (!std::isfinite(lg.loss)) {
      throw DivergenceError(
          "non-finite training loss at iteration " + std::to_string(i) +
              " (last finite iteration " + std::to_string(last_finite) + ")",
          last_finite);
    }
    last_finite = i;
    loss_sum += lg.loss;
    ++loss_count;

    nn::Network grads = nn::backprop<float>(net, fwd.cache, lg.grads);
    if (config.optim.clip_norm > 0.0f) {
      nn::clip_global_norm(grads, config.optim.clip_norm);
    }
    opt.step(net, grads);

    if (plan.mode == PruneMode::kGradual) {
      regrown += pruner.step(masked).counts.regrown;
    } else if (plan.mode == PruneMode::kHard) {
      if (!hard_done && i + 1 == plan.hard_prune_itr) do_hard_prune();
      if (hard_done) prune::apply_masks(masked);
    }

    const long done = i + 1;
    if (done % ipe == 0) val = validation_loss(net, task, validation);

    if (i % freq == 0) {
      const auto r = prune::sparsity_report(masked);
      result.schedule.push_back({i, current_eps(), r.pruned, regrown,
                                 r.overall});
    }
    if (done % freq == 0 || done == total) {
      const auto r = prune::sparsity_report(masked);
      MetricsRecord m;
      m.iteration = done;
      m.epoch = static_cast<double>(done) / static_cast<double>(ipe);
      m.train_loss = loss_sum / static_cast<double>(loss_count);
      m.val_loss = val;
      m.eps = current_eps();
      m.sparsity_overall = r.overall;
      m.params_remaining = r.remaining();
      if (config.record_wall_time) {
        m.wall_seconds = std::chrono::duration<double>(
                             std::chrono::steady_clock::now() - t0)
                             .count();
      }
      for (const auto& l : r.layers) m.layer_sparsity.push_back(l.sparsity);
      result.metrics.push_back(std::move(m));
      loss_sum = 0.0;
      loss_count = 0;
    }
  }

  if (total % ipe != 0) val = validation_loss(net, task, validation);
  result.final_val_loss = val;
  result.report = prune::sparsity_report(masked);
  std::size_t kept = 0;
  for (const auto& p : masked) {
    if (!p.prunable) continue;
    for (auto m : p.mask) kept += m;
  }
  result.final_kept_prunable = kept;
  return result;
}

}  // namespace prnn::harness
