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

// A stack of recurrent layers followed by a fully connected head, plus the
// losses used by the synthetic tasks.

#ifndef PRNN_NETWORK_HPP_
#define PRNN_NETWORK_HPP_

#include <cstdint>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "prnn/layers.hpp"
#include "prnn/rng.hpp"
#include "prnn/tensor.hpp"

namespace prnn::nn {

enum class CellType : std::uint8_t { kRnn = 0, kGru = 1 };

std::string_view to_string(CellType c) noexcept;
CellType parse_cell(std::string_view name);

// Pruning groups parameters by layer type; each type gets its own threshold
// schedule.
enum class LayerType : std::uint8_t { kRecurrent = 0, kLinear = 1 };

inline constexpr std::size_t kLayerTypeCount = 2;
std::string_view to_string(LayerType t) noexcept;

// kLastStep applies the head to the final hidden state only (sequence
// regression); kEveryStep applies it at every timestep (next-token
// prediction).
enum class OutputMode : std::uint8_t { kLastStep = 0, kEveryStep = 1 };

struct NetworkSpec {
  CellType cell = CellType::kRnn;
  Activation activation = Activation::kClippedRelu;  // RNN cells only
  std::size_t input_size = 1;
  std::size_t hidden_size = 1;
  std::size_t depth = 1;
  std::size_t output_size = 1;
  OutputMode output_mode = OutputMode::kLastStep;

  bool operator==(const NetworkSpec&) const = default;
};

// Non-owning view of one parameter tensor. Vectors appear as 1 x n.
template <typename T>
struct ParamSlot {
  std::string name;
  std::span<T> values;
  std::size_t rows = 0;
  std::size_t cols = 0;
  LayerType type = LayerType::kRecurrent;
  bool prunable = false;
};

template <typename T>
class BasicNetwork {
 public:
  using RecurrentLayer = std::variant<BasicRnnLayer<T>, BasicGruLayer<T>>;

  BasicNetwork() = default;
  // Zero-initialized network of the given shape.
  explicit BasicNetwork(const NetworkSpec& spec);

  const NetworkSpec& spec() const noexcept { return spec_; }

  const std::vector<RecurrentLayer>& layers() const noexcept { return layers_; }
  const BasicFcLayer<T>& head() const noexcept { return head_; }

  // Mutable access invalidates outstanding forward caches.
  std::vector<RecurrentLayer>& mutable_layers() noexcept {
    ++revision_;
    return layers_;
  }
  BasicFcLayer<T>& mutable_head() noexcept {
    ++revision_;
    return head_;
  }

  // Stable order: layers bottom to top, then the head. Within an RNN layer
  // W_x, W_h, b; within a GRU layer W_z, W_r, W_c, U_z, U_r, U_c, b_z, b_r,
  // b_c; head W, b.
  std::vector<ParamSlot<T>> mutable_parameters();
  std::vector<ParamSlot<const T>> parameters() const;

  std::size_t parameter_count() const;

  std::uint64_t revision() const noexcept { return revision_; }

  BasicNetwork zeros_like() const { return BasicNetwork(spec_); }

 private:
  NetworkSpec spec_;
  std::vector<RecurrentLayer> layers_;
  BasicFcLayer<T> head_;
  std::uint64_t revision_ = 0;
};

using Network = BasicNetwork<float>;

// Weights uniform in [-1/sqrt(fan_in), 1/sqrt(fan_in)) drawn in parameter
// order; biases zero.
Network init_network(const NetworkSpec& spec, Rng& rng);

template <typename To, typename From>
BasicNetwork<To> cast_network(const BasicNetwork<From>& net) {
  BasicNetwork<To> out(net.spec());
  auto dst = out.mutable_parameters();
  const auto src = net.parameters();
  for (std::size_t i = 0; i < src.size(); ++i) {
    for (std::size_t k = 0; k < src[i].values.size(); ++k) {
      dst[i].values[k] = static_cast<To>(src[i].values[k]);
    }
  }
  return out;
}

template <typename T>
struct NetworkCache {
  const BasicNetwork<T>* owner = nullptr;
  std::uint64_t revision = 0;
  std::vector<Matrix<T>> inputs;
  std::vector<std::variant<RnnTrace<T>, GruTrace<T>>> traces;
  std::vector<Matrix<T>> head_inputs;  // one per emitted output
};

template <typename T>
struct ForwardResult {
  std::vector<Matrix<T>> outputs;  // 1 (kLastStep) or T (kEveryStep) of B x out
  NetworkCache<T> cache;
};

// inputs: T matrices of B x input_size. Hidden state starts at zero.
template <typename T>
ForwardResult<T> forward(const BasicNetwork<T>& net,
                         std::span<const Matrix<T>> inputs);

// Exact BPTT gradients of every parameter, laid out as a network of the same
// shape. Masks are not consulted: a pruned (zeroed) weight still receives
// its dense gradient. Throws ContractError when `cache` was produced by a
// different network or before the network was modified.
template <typename T>
BasicNetwork<T> backprop(const BasicNetwork<T>& net,
                         const NetworkCache<T>& cache,
                         std::span<const Matrix<T>> output_grads);

template <typename T>
struct LossAndGrad {
  T loss{};
  std::vector<Matrix<T>> grads;
};

// Mean over the batch of the squared error summed over output units.
template <typename T>
LossAndGrad<T> mse_loss(std::span<const Matrix<T>> outputs,
                        const Matrix<T>& targets);

// Mean over steps and batch rows of -log softmax(logits)[target].
template <typename T>
LossAndGrad<T> softmax_cross_entropy(
    std::span<const Matrix<T>> logits,
    const std::vector<std::vector<std::uint32_t>>& targets);

}  // namespace prnn::nn

#endif  // PRNN_NETWORK_HPP_
