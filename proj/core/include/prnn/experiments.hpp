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

// The harness subcommands: calibrate, train, hard-prune, compare, bench,
// compress and curves. Each run_* function computes its result and, when the
// config names an output directory, writes its artifacts there.

#ifndef PRNN_EXPERIMENTS_HPP_
#define PRNN_EXPERIMENTS_HPP_

#include <array>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "prnn/bench.hpp"
#include "prnn/config.hpp"
#include "prnn/pruning.hpp"
#include "prnn/serialize.hpp"
#include "prnn/trainer.hpp"

namespace prnn::harness {

struct LayerCalibration {
  double q = 0.0;
  prune::PruneHyperParams schedule;
};

struct CalibrationFile {
  std::uint64_t seed = 0;
  double percentile = prune::kDefaultPercentile;
  double ramp_factor = 1.5;
  std::array<std::optional<LayerCalibration>, nn::kLayerTypeCount> layers;
};

std::string to_toml(const CalibrationFile& calibration);
CalibrationFile parse_calibration(std::string_view text);
CalibrationFile read_calibration(const std::filesystem::path& path);

// Trains dense for prune.calibration_epochs and measures q per layer type
// over the prunable weights.
CalibrationFile calibrate(const ExperimentConfig& config);

// Start/ramp/end/freq come from the overrides or the defaults
// (start = one epoch, ramp = total/4, end = total/2, freq = 100). Slopes come
// from the overrides, otherwise from q in `calibration`. Throws ConfigError
// when a slope is needed and no calibration is given.
prune::ScheduleSet resolve_schedules(const ExperimentConfig& config,
                                     const CalibrationFile* calibration);
bool needs_calibration(const ExperimentConfig& config);

// Builds the plan for config.prune.mode, calibrating inline when the gradual
// schedule needs q and no calibration file is configured.
PruningPlan make_plan(const ExperimentConfig& config,
                      std::optional<CalibrationFile>* calibration_used = nullptr);

std::size_t prunable_weight_count(const ExperimentConfig& config);

CalibrationFile run_calibrate(const ExperimentConfig& config);
TrainResult run_train(const ExperimentConfig& config);
TrainResult run_hard_prune(const ExperimentConfig& config);

// Writes metrics.csv, schedule.csv, model.sprn and config.toml into `dir`.
void write_run(const std::filesystem::path& dir, const ExperimentConfig& config,
               const TrainResult& result);

struct ComparisonResult {
  TrainResult dense;
  TrainResult gradual;
  TrainResult hard;
  long hard_prune_itr = 0;
  // (hard - gradual) / hard, in percent; positive when gradual is better.
  double gap_percent() const noexcept;
};

// Dense, gradual and hard runs that share every setting except pruning.
// Hard pruning happens at the epoch boundary nearest below end_itr / 2 and
// keeps as many weights as the gradual run ends with.
ComparisonResult run_comparison(const ExperimentConfig& config);
std::string comparison_csv(const ComparisonResult& result);

std::vector<sparse::BenchRecord> run_bench(const ExperimentConfig& config);
std::string bench_svg(const std::vector<sparse::BenchRecord>& records);

struct TensorBytes {
  bool csr = false;
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::size_t nonzeros = 0;
  std::size_t bytes = 0;
  std::size_t dense_bytes = 0;
};

struct LayerBytes {
  sparse::LayerKind kind = sparse::LayerKind::kFc;
  std::size_t dense_bytes = 0;  // layer header included
  std::size_t actual_bytes = 0;
  std::vector<TensorBytes> tensors;
};

struct CompressReport {
  std::size_t dense_bytes = 0;  // file header included
  std::size_t actual_bytes = 0;
  std::vector<LayerBytes> layers;
  double ratio() const noexcept {
    return static_cast<double>(dense_bytes) / static_cast<double>(actual_bytes);
  }
};

CompressReport compress_report(const sparse::SparseModel& model);
CompressReport run_compress(const std::filesystem::path& model_file);
std::string format_report(const CompressReport& report);

// Writes loss.svg for all runs, plus sparsity.svg and pruned.svg when any
// run is sparse. A schedule.csv next to a metrics file supplies the pruned
// counts; otherwise they are derived from the metrics rows. Returns the
// written paths. Throws ParameterError on no input or an empty metrics file.
std::vector<std::filesystem::path> emit_curves(
    const std::vector<std::filesystem::path>& metrics_files,
    const std::filesystem::path& out_dir);

}  // namespace prnn::harness

#endif  // PRNN_EXPERIMENTS_HPP_
