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

// Experiment configuration and its plain-text file format.
//
// The format is a TOML subset: `[section]` headers (dotted names allowed),
// `key = value` lines, `#` comments, values that are integers, floats,
// booleans, double-quoted strings, or single-line arrays of those. Keys are
// addressed by their full dotted path, e.g. `prune.recurrent.start_itr`.
// The full schema with defaults is listed in docs/config.md.

#ifndef PRNN_CONFIG_HPP_
#define PRNN_CONFIG_HPP_

#include <array>
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "prnn/bench.hpp"
#include "prnn/network.hpp"
#include "prnn/pruning.hpp"
#include "prnn/tasks.hpp"

namespace prnn::harness {

using Scalar = std::variant<std::int64_t, double, bool, std::string>;
using Value = std::variant<std::int64_t, double, bool, std::string,
                           std::vector<Scalar>>;
using Table = std::map<std::string, Value>;

// Throws ConfigError with the 1-based line number as the field on syntax
// errors and duplicate keys.
Table parse_toml(std::string_view text);

// Parses `key=value` (value in the same syntax as the file) into `table`,
// replacing any existing entry.
void apply_override(Table& table, std::string_view assignment);

enum class PruneMode : std::uint8_t { kNone, kGradual, kHard };

std::string_view to_string(PruneMode m) noexcept;

struct TaskConfig {
  nn::TaskKind kind = nn::TaskKind::kAdding;
  std::size_t seq_len = 20;
  std::size_t batch_size = 8;
  std::size_t val_size = 256;
};

struct ModelConfig {
  nn::CellType cell = nn::CellType::kRnn;
  nn::Activation activation = nn::Activation::kClippedRelu;
  std::size_t hidden = 128;
  std::size_t depth = 1;
};

struct OptimConfig {
  float learning_rate = 0.01f;
  float momentum = 0.9f;
  float clip_norm = 5.0f;
};

// Explicit per-layer-type schedule values; unset fields come from the
// heuristic defaults and calibration.
struct ScheduleOverrides {
  bool enabled = true;
  std::optional<long> start_itr;
  std::optional<long> ramp_itr;
  std::optional<long> end_itr;
  std::optional<long> freq;
  std::optional<double> start_slope;
  std::optional<double> ramp_slope;
};

struct PruneConfig {
  PruneMode mode = PruneMode::kNone;
  double ramp_factor = 1.5;
  double percentile = prune::kDefaultPercentile;
  int calibration_epochs = 1;
  std::string calibration_file;  // empty: calibrate inline
  std::array<ScheduleOverrides, nn::kLayerTypeCount> schedule;

  // Hard pruning.
  int hard_prune_epoch = 10;
  std::optional<std::size_t> hard_keep;  // prunable weights to keep
  std::optional<double> hard_sparsity;   // or fraction of prunable to drop
};

struct BenchConfig {
  std::vector<std::size_t> sizes = {1760};
  std::vector<double> sparsities = {0.0, 0.90, 0.95, 0.98};
  sparse::BenchLayerType layer_type = sparse::BenchLayerType::kRnn;
  int repetitions = 30;
  int warmup = 5;
  unsigned threads = 1;
};

struct ExperimentConfig {
  std::uint64_t seed = 1;
  std::string out_dir = "runs/default";
  int epochs = 20;
  long iters_per_epoch = 500;
  bool record_wall_time = false;
  TaskConfig task;
  ModelConfig model;
  OptimConfig optim;
  PruneConfig prune;
  BenchConfig bench;

  long total_iters() const noexcept { return epochs * iters_per_epoch; }

  // Throws ConfigError naming the first invalid field.
  void validate() const;
};

ExperimentConfig config_from_table(const Table& table);
ExperimentConfig parse_config(std::string_view text);
ExperimentConfig load_config(const std::filesystem::path& path);

// Round-trips through parse_config.
std::string to_toml(const ExperimentConfig& config);

// Shortest text that parses back to exactly the same double.
std::string format_double(double v);

}  // namespace prnn::harness

#endif  // PRNN_CONFIG_HPP_
