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

#include "prnn/optimizer.hpp"

#include <cmath>
#include <string>

namespace prnn::nn {

NesterovSgd::NesterovSgd(float learning_rate, float momentum)
    : learning_rate_(learning_rate), momentum_(momentum) {
  if (!(learning_rate >= 0.0f) || !std::isfinite(learning_rate)) {
    throw ParameterError("learning rate must be finite and >= 0");
  }
  if (!(momentum >= 0.0f && momentum < 1.0f)) {
    throw ParameterError("momentum must lie in [0, 1)");
  }
}

void NesterovSgd::step(std::vector<ParamSlot<float>> params,
                       const std::vector<ParamSlot<const float>>& grads) {
  if (params.size() != grads.size()) {
    throw ShapeError("nesterov_step: " + std::to_string(params.size()) +
                     " parameters vs " + std::to_string(grads.size()) +
                     " gradients");
  }
  if (velocity_.empty()) {
    for (const auto& p : params) velocity_.emplace_back(p.values.size(), 0.0f);
  }
  if (velocity_.size() != params.size()) {
    throw ShapeError("nesterov_step: parameter layout changed");
  }
  for (std::size_t i = 0; i < params.size(); ++i) {
    auto& p = params[i].values;
    const auto& g = grads[i].values;
    auto& v = velocity_[i];
    if (p.size() != g.size() || v.size() != p.size()) {
      throw ShapeError("nesterov_step: shape mismatch for " + params[i].name);
    }
    for (std::size_t k = 0; k < p.size(); ++k) {
      v[k] = momentum_ * v[k] + g[k];
      p[k] -= learning_rate_ * (g[k] + momentum_ * v[k]);
    }
  }
}

float clip_global_norm(Network& grads, float max_norm) {
  double sq = 0.0;
  for (const auto& p : grads.parameters()) {
    for (float v : p.values) sq += static_cast<double>(v) * v;
  }
  const auto norm = static_cast<float>(std::sqrt(sq));
  if (max_norm > 0.0f && norm > max_norm) {
    const float scale = max_norm / norm;
    for (auto& p : grads.mutable_parameters()) {
      for (float& v : p.values) v *= scale;
    }
  }
  return norm;
}

}  // namespace prnn::nn
