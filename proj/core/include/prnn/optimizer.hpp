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

#ifndef PRNN_OPTIMIZER_HPP_
#define PRNN_OPTIMIZER_HPP_

#include <vector>

#include "prnn/network.hpp"

namespace prnn::nn {

// Nesterov momentum in the form used by most frameworks:
//
//   v <- momentum * v + g
//   p <- p - lr * (g + momentum * v)
//
// With momentum 0 this is plain SGD. Velocity buffers are created on the
// first step and must match the parameter layout on every later step.
class NesterovSgd {
 public:
  NesterovSgd(float learning_rate, float momentum);

  float learning_rate() const noexcept { return learning_rate_; }
  float momentum() const noexcept { return momentum_; }

  void step(std::vector<ParamSlot<float>> params,
            const std::vector<ParamSlot<const float>>& grads);
  void step(Network& net, const Network& grads) {
    step(net.mutable_parameters(), grads.parameters());
  }

  const std::vector<std::vector<float>>& velocities() const noexcept {
    return velocity_;
  }

 private:
  float learning_rate_;
  float momentum_;
  std::vector<std::vector<float>> velocity_;
};

// Scales all gradients so their joint L2 norm is at most max_norm. Returns
// the norm before scaling. max_norm <= 0 disables clipping.
float clip_global_norm(Network& grads, float max_norm);

}  // namespace prnn::nn

#endif  // PRNN_OPTIMIZER_HPP_
