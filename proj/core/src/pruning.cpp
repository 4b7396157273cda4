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

#include "prnn/pruning.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace prnn::prune {

void PruneHyperParams::validate() const {
  if (!(start_itr < ramp_itr && ramp_itr < end_itr)) {
    throw ParameterError("prune schedule requires start_itr < ramp_itr < "
                         "end_itr, got " + std::to_string(start_itr) + ", " +
                         std::to_string(ramp_itr) + ", " +
                         std::to_string(end_itr));
  }
  if (start_itr < 0) throw ParameterError("start_itr must be >= 0");
  if (freq < 1) throw ParameterError("freq must be >= 1");
  if (!(start_slope >= 0.0) || !std::isfinite(start_slope)) {
    throw ParameterError("start_slope must be finite and >= 0");
  }
  if (!(ramp_slope >= start_slope) || !std::isfinite(ramp_slope)) {
    throw ParameterError("ramp_slope must be finite and >= start_slope");
  }
}

double percentile_q(std::span<const std::span<const float>> weights,
                    double pct) {
  if (!(pct > 0.0 && pct <= 1.0)) {
    throw ParameterError("percentile must lie in (0, 1]");
  }
  std::vector<float> mags;
  for (const auto& w : weights) {
    for (float v : w) mags.push_back(std::fabs(v));
  }
  if (mags.empty()) throw ParameterError("percentile_q: no weights given");
  const auto n = static_cast<double>(mags.size());
  auto rank = static_cast<std::size_t>(std::ceil(pct * n));
  rank = std::clamp<std::size_t>(rank, 1, mags.size());
  auto nth = mags.begin() + static_cast<std::ptrdiff_t>(rank - 1);
  std::nth_element(mags.begin(), nth, mags.end());
  return *nth;
}

double percentile_q(const std::vector<DenseMatrix>& weights, double pct) {
  std::vector<std::span<const float>> views;
  views.reserve(weights.size());
  for (const auto& m : weights) views.push_back(m.values());
  return percentile_q(std::span<const std::span<const float>>(views), pct);
}

double compute_start_slope(double q, long start_itr, long ramp_itr,
                           long end_itr, long freq) {
  if (!(q >= 0.0) || !std::isfinite(q)) {
    throw ParameterError("q must be finite and >= 0");
  }
  if (freq < 1) throw ParameterError("freq must be >= 1");
  if (!(start_itr < ramp_itr && ramp_itr < end_itr)) {
    throw ParameterError("start slope needs start_itr < ramp_itr < end_itr");
  }
  const double denom = 2.0 * static_cast<double>(ramp_itr - start_itr) +
                       3.0 * static_cast<double>(end_itr - ramp_itr);
  return 2.0 * q * static_cast<double>(freq) / denom;
}

CalibrationResult calibrate(double q, long start_itr, long ramp_itr,
                            long end_itr, long freq, double ramp_factor) {
  if (!(ramp_factor >= kMinRampFactor && ramp_factor <= kMaxRampFactor)) {
    throw ParameterError("ramp_factor must lie in [1.5, 2.0], got " +
                         std::to_string(ramp_factor));
  }
  CalibrationResult r;
  r.q = q;
  r.start_slope = compute_start_slope(q, start_itr, ramp_itr, end_itr, freq);
  r.ramp_slope = ramp_factor * r.start_slope;
  return r;
}

PruneHyperParams default_hyperparams(long total_iters, long iters_per_epoch,
                                     double q, double ramp_factor) {
  if (iters_per_epoch < kDefaultFreq) {
    throw ParameterError("iters_per_epoch must be >= freq (100)");
  }
  if (total_iters < 4 * iters_per_epoch) {
    throw ParameterError("default schedule needs at least 4 epochs");
  }
  PruneHyperParams hp;
  hp.start_itr = iters_per_epoch;
  hp.ramp_itr = total_iters / 4;
  hp.end_itr = total_iters / 2;
  hp.freq = kDefaultFreq;
  if (!(hp.start_itr < hp.ramp_itr && hp.ramp_itr < hp.end_itr)) {
    throw ParameterError(
        "degenerate default schedule: start=" + std::to_string(hp.start_itr) +
        " ramp=" + std::to_string(hp.ramp_itr) +
        " end=" + std::to_string(hp.end_itr));
  }
  const CalibrationResult c = calibrate(q, hp.start_itr, hp.ramp_itr,
                                        hp.end_itr, hp.freq, ramp_factor);
  hp.start_slope = c.start_slope;
  hp.ramp_slope = c.ramp_slope;
  return hp;
}

bool is_update_iteration(const PruneHyperParams& hp, long itr) noexcept {
  return itr > hp.start_itr && itr < hp.end_itr && itr % hp.freq == 0;
}

double schedule_formula(const PruneHyperParams& hp, long itr) noexcept {
  const auto f = static_cast<double>(hp.freq);
  if (itr < hp.ramp_itr) {
    return hp.start_slope * static_cast<double>(itr - hp.start_itr + 1) / f;
  }
  return (hp.start_slope * static_cast<double>(hp.ramp_itr - hp.start_itr + 1) +
          hp.ramp_slope * static_cast<double>(itr - hp.ramp_itr + 1)) /
         f;
}

namespace {

long latest_update_at_or_before(const PruneHyperParams& hp, long itr) noexcept {
  long u = std::min(itr, hp.end_itr - 1);
  if (u <= hp.start_itr) return -1;
  u -= u % hp.freq;
  return u > hp.start_itr ? u : -1;
}

}  // namespace

double threshold_at(const PruneHyperParams& hp, long itr) noexcept {
  const long u = latest_update_at_or_before(hp, itr);
  return u < 0 ? 0.0 : schedule_formula(hp, u);
}

long last_update_iteration(const PruneHyperParams& hp) noexcept {
  return latest_update_at_or_before(hp, hp.end_itr - 1);
}

void ThresholdState::raise(LayerType t, double eps, long itr) {
  double& cur = epsilon_[static_cast<std::size_t>(t)];
  if (eps < cur) {
    throw MonotonicityError(
        std::string("threshold for ") + std::string(nn::to_string(t)) +
        " layers would decrease from " + std::to_string(cur) + " to " +
        std::to_string(eps));
  }
  cur = eps;
  last_update_itr_ = itr;
}

std::size_t MaskedParameter::pruned_count() const noexcept {
  return static_cast<std::size_t>(std::count(mask.begin(), mask.end(), 0));
}

double MaskedParameter::sparsity() const noexcept {
  return mask.empty() ? 0.0
                      : static_cast<double>(pruned_count()) /
                            static_cast<double>(mask.size());
}

MaskedParameters attach_masks(std::vector<nn::ParamSlot<float>> slots) {
  MaskedParameters out;
  out.reserve(slots.size());
  for (auto& s : slots) {
    MaskedParameter p;
    p.name = std::move(s.name);
    p.weights = s.values;
    p.rows = s.rows;
    p.cols = s.cols;
    p.mask.assign(s.values.size(), 1);
    p.layer_type = s.type;
    p.prunable = s.prunable;
    out.push_back(std::move(p));
  }
  return out;
}

MaskedParameter wrap(std::string name, DenseMatrix& m, LayerType type,
                     bool prunable) {
  MaskedParameter p;
  p.name = std::move(name);
  p.weights = m.values();
  p.rows = m.rows();
  p.cols = m.cols();
  p.mask.assign(m.size(), 1);
  p.layer_type = type;
  p.prunable = prunable;
  return p;
}

MaskUpdateCounts update_masks(
    MaskedParameters& params, ThresholdState& state,
    const std::array<std::optional<double>, kLayerTypeCount>& eps, long itr) {
  for (std::size_t t = 0; t < kLayerTypeCount; ++t) {
    if (eps[t]) state.raise(static_cast<LayerType>(t), *eps[t], itr);
  }
  MaskUpdateCounts counts;
  for (auto& p : params) {
    const auto& e = eps[static_cast<std::size_t>(p.layer_type)];
    if (!p.prunable || !e) continue;
    if (p.mask.size() != p.weights.size()) {
      throw ShapeError("mask/weight size mismatch for " + p.name);
    }
    const double threshold = *e;
    for (std::size_t i = 0; i < p.weights.size(); ++i) {
      const std::uint8_t keep =
          static_cast<double>(std::fabs(p.weights[i])) >= threshold ? 1 : 0;
      if (p.mask[i] && !keep) ++counts.newly_pruned;
      if (!p.mask[i] && keep) ++counts.regrown;
      p.mask[i] = keep;
    }
  }
  return counts;
}

void apply_mask(MaskedParameter& param) {
  if (param.mask.size() != param.weights.size()) {
    throw ShapeError("mask/weight size mismatch for " + param.name);
  }
  for (std::size_t i = 0; i < param.weights.size(); ++i) {
    if (!param.mask[i]) param.weights[i] = 0.0f;
  }
}

void apply_masks(MaskedParameters& params) {
  for (auto& p : params) {
    if (p.prunable) apply_mask(p);
  }
}

GradualPruner::GradualPruner(ScheduleSet schedules)
    : schedules_(std::move(schedules)) {
  for (const auto& s : schedules_) {
    if (s) s->validate();
  }
}

PruneStep GradualPruner::step(MaskedParameters& params) {
  PruneStep out;
  out.iteration = iteration_;
  std::array<std::optional<double>, kLayerTypeCount> eps;
  for (std::size_t t = 0; t < kLayerTypeCount; ++t) {
    const auto& hp = schedules_[t];
    if (hp && is_update_iteration(*hp, iteration_)) {
      eps[t] = schedule_formula(*hp, iteration_);
      out.updated = true;
    }
  }
  if (out.updated) out.counts = update_masks(params, state_, eps, iteration_);
  apply_masks(params);
  ++iteration_;
  return out;
}

std::size_t prunable_count(const MaskedParameters& params) noexcept {
  std::size_t n = 0;
  for (const auto& p : params) {
    if (p.prunable) n += p.size();
  }
  return n;
}

void hard_prune(MaskedParameters& params, std::size_t target_remaining) {
  const std::size_t total = prunable_count(params);
  if (target_remaining == 0 || target_remaining > total) {
    throw ParameterError("hard_prune: target_remaining must be in [1, " +
                         std::to_string(total) + "], got " +
                         std::to_string(target_remaining));
  }
  struct Ref {
    float magnitude;
    std::uint32_t param;
    std::uint32_t index;
  };
  std::vector<Ref> refs;
  refs.reserve(total);
  for (std::size_t p = 0; p < params.size(); ++p) {
    if (!params[p].prunable) continue;
    const auto& w = params[p].weights;
    for (std::size_t i = 0; i < w.size(); ++i) {
      refs.push_back({std::fabs(w[i]), static_cast<std::uint32_t>(p),
                      static_cast<std::uint32_t>(i)});
    }
  }
  std::stable_sort(refs.begin(), refs.end(), [](const Ref& a, const Ref& b) {
    return a.magnitude > b.magnitude;
  });
  for (auto& p : params) {
    if (p.prunable) std::fill(p.mask.begin(), p.mask.end(), 0);
  }
  for (std::size_t k = 0; k < target_remaining; ++k) {
    params[refs[k].param].mask[refs[k].index] = 1;
  }
}

void hard_prune_threshold(MaskedParameters& params, double threshold) {
  if (!(threshold >= 0.0)) {
    throw ParameterError("hard_prune: threshold must be >= 0");
  }
  for (auto& p : params) {
    if (!p.prunable) continue;
    for (std::size_t i = 0; i < p.weights.size(); ++i) {
      p.mask[i] =
          static_cast<double>(std::fabs(p.weights[i])) >= threshold ? 1 : 0;
    }
  }
}

SparsityReport sparsity_report(const MaskedParameters& params) {
  SparsityReport r;
  for (const auto& p : params) {
    SparsityReport::Entry e{p.name, p.size(), p.pruned_count(), p.sparsity()};
    r.total += e.size;
    r.pruned += e.pruned;

    const std::string layer = p.name.substr(0, p.name.find('.'));
    if (r.layers.empty() || r.layers.back().name != layer) {
      r.layers.push_back({layer, 0, 0, 0.0});
    }
    r.layers.back().size += e.size;
    r.layers.back().pruned += e.pruned;
    r.parameters.push_back(std::move(e));
  }
  for (auto& l : r.layers) {
    l.sparsity = l.size == 0 ? 0.0
                             : static_cast<double>(l.pruned) /
                                   static_cast<double>(l.size);
  }
  r.overall = r.total == 0 ? 0.0
                           : static_cast<double>(r.pruned) /
                                 static_cast<double>(r.total);
  return r;
}

}  // namespace prnn::prune
