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

// Gradual magnitude pruning during training.
//
// Every prunable weight matrix carries a binary keep-mask. After each
// optimizer step the pruner (1) on schedule-update iterations raises the
// per-layer-type threshold epsilon and recomputes masks from the freshly
// updated, not yet masked weights, (2) multiplies every prunable weight by
// its mask, (3) advances its iteration counter. Because masks are recomputed
// from unmasked values, a pruned weight whose update carries it back above
// epsilon is kept again.
//
// The threshold follows a two-slope schedule. On iterations i with
// start_itr < i < end_itr and i % freq == 0:
//
//   i <  ramp_itr:  eps = theta * (i - start_itr + 1) / freq
//   i >= ramp_itr:  eps = (theta * (ramp_itr - start_itr + 1)
//                          + phi * (i - ramp_itr + 1)) / freq
//
// and it holds its last value otherwise. The start slope theta is chosen so
// that, with phi = 1.5 theta, eps reaches q at end_itr:
//
//   theta = 2 q freq / (2 (ramp_itr - start_itr) + 3 (end_itr - ramp_itr))
//
// where q is the 90th-percentile magnitude of a trained weight array.

#ifndef PRNN_PRUNING_HPP_
#define PRNN_PRUNING_HPP_

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "prnn/network.hpp"
#include "prnn/tensor.hpp"

namespace prnn::prune {

using nn::LayerType;
using nn::kLayerTypeCount;

inline constexpr long kDefaultFreq = 100;
inline constexpr double kDefaultPercentile = 0.9;
inline constexpr double kMinRampFactor = 1.5;
inline constexpr double kMaxRampFactor = 2.0;

struct PruneHyperParams {
  long start_itr = 0;
  long ramp_itr = 0;
  long end_itr = 0;
  double start_slope = 0.0;  // theta
  double ramp_slope = 0.0;   // phi
  long freq = kDefaultFreq;

  // Throws ParameterError unless start < ramp < end, 0 <= theta <= phi and
  // freq >= 1.
  void validate() const;

  bool operator==(const PruneHyperParams&) const = default;
};

// One optional schedule per layer type; an absent entry leaves that type
// unpruned.
using ScheduleSet = std::array<std::optional<PruneHyperParams>, kLayerTypeCount>;
using EpsilonSet = std::array<double, kLayerTypeCount>;

struct CalibrationResult {
  double q = 0.0;
  double start_slope = 0.0;
  double ramp_slope = 0.0;
};

// Nearest-rank percentile of |w| over the concatenation of all inputs:
// ascending sort, element at index ceil(pct * n) - 1.
double percentile_q(std::span<const std::span<const float>> weights,
                    double pct = kDefaultPercentile);
double percentile_q(const std::vector<DenseMatrix>& weights,
                    double pct = kDefaultPercentile);

double compute_start_slope(double q, long start_itr, long ramp_itr,
                           long end_itr, long freq);

// phi = ramp_factor * theta; ramp_factor must lie in [1.5, 2.0].
CalibrationResult calibrate(double q, long start_itr, long ramp_itr,
                            long end_itr, long freq, double ramp_factor);

// Heuristic breakpoints: pruning starts at the second epoch, ramps at 25%
// and stops at 50% of training, updating every 100 iterations.
PruneHyperParams default_hyperparams(long total_iters, long iters_per_epoch,
                                     double q, double ramp_factor);

bool is_update_iteration(const PruneHyperParams& hp, long itr) noexcept;

// The branch formula evaluated at itr, without gating.
double schedule_formula(const PruneHyperParams& hp, long itr) noexcept;

// Threshold in effect after the pruning step of iteration itr: the formula at
// the latest update iteration <= itr, or 0 if there has been none.
double threshold_at(const PruneHyperParams& hp, long itr) noexcept;

// Last iteration at which the schedule updates, or -1 if it never does.
long last_update_iteration(const PruneHyperParams& hp) noexcept;

class ThresholdState {
 public:
  double epsilon(LayerType t) const noexcept {
    return epsilon_[static_cast<std::size_t>(t)];
  }
  const EpsilonSet& epsilons() const noexcept { return epsilon_; }
  long last_update_itr() const noexcept { return last_update_itr_; }

  // Throws MonotonicityError if eps is below the current value.
  void raise(LayerType t, double eps, long itr);

 private:
  EpsilonSet epsilon_{};
  long last_update_itr_ = -1;
};

// A weight tensor (non-owning view) with its keep-mask. mask[i] == 1 keeps
// the weight, 0 prunes it.
struct MaskedParameter {
  std::string name;
  std::span<float> weights;
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<std::uint8_t> mask;
  LayerType layer_type = LayerType::kRecurrent;
  bool prunable = true;

  std::size_t size() const noexcept { return weights.size(); }
  std::size_t pruned_count() const noexcept;
  double sparsity() const noexcept;
};

using MaskedParameters = std::vector<MaskedParameter>;

// All-ones masks over the given parameter views.
MaskedParameters attach_masks(std::vector<nn::ParamSlot<float>> slots);
MaskedParameter wrap(std::string name, DenseMatrix& m, LayerType type,
                     bool prunable = true);

struct MaskUpdateCounts {
  std::size_t newly_pruned = 0;
  std::size_t regrown = 0;
};

// Recomputes the masks of prunable parameters whose layer type has a value in
// `eps`: keep iff |w| >= eps. Raises `state` first, so a decreasing epsilon
// throws MonotonicityError and leaves the masks untouched.
MaskUpdateCounts update_masks(
    MaskedParameters& params, ThresholdState& state,
    const std::array<std::optional<double>, kLayerTypeCount>& eps, long itr);

void apply_mask(MaskedParameter& param);
void apply_masks(MaskedParameters& params);

struct PruneStep {
  long iteration = 0;
  bool updated = false;
  MaskUpdateCounts counts;
};

// Drives the schedule from inside a training loop; call step() once per
// iteration, after the optimizer update.
class GradualPruner {
 public:
  explicit GradualPruner(ScheduleSet schedules);

  PruneStep step(MaskedParameters& params);

  long iteration() const noexcept { return iteration_; }
  const ThresholdState& state() const noexcept { return state_; }
  const ScheduleSet& schedules() const noexcept { return schedules_; }

 private:
  ScheduleSet schedules_;
  ThresholdState state_;
  long iteration_ = 0;
};

// One-shot pruning: keeps exactly `target_remaining` prunable weights with
// the largest magnitude (ties go to the lower global index, counting through
// the parameters in order). Throws ParameterError unless
// 0 < target_remaining <= prunable count.
void hard_prune(MaskedParameters& params, std::size_t target_remaining);

// One-shot pruning by threshold: keep iff |w| >= threshold.
void hard_prune_threshold(MaskedParameters& params, double threshold);

std::size_t prunable_count(const MaskedParameters& params) noexcept;

struct SparsityReport {
  struct Entry {
    std::string name;
    std::size_t size = 0;
    std::size_t pruned = 0;
    double sparsity = 0.0;
  };
  std::vector<Entry> parameters;  // every tensor, in order
  std::vector<Entry> layers;      // grouped by name prefix before '.'
  std::size_t total = 0;
  std::size_t pruned = 0;
  double overall = 0.0;  // over all parameters, biases included
  std::size_t remaining() const noexcept { return total - pruned; }
};

SparsityReport sparsity_report(const MaskedParameters& params);

}  // namespace prnn::prune

#endif  // PRNN_PRUNING_HPP_
