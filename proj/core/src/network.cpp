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

#include "prnn/network.hpp"

#include <cmath>
#include <limits>

namespace prnn::nn {

std::string_view to_string(CellType c) noexcept {
  return c == CellType::kRnn ? "rnn" : "gru";
}

CellType parse_cell(std::string_view name) {
  if (name == "rnn") return CellType::kRnn;
  if (name == "gru") return CellType::kGru;
  throw ParameterError("unknown cell type '" + std::string(name) + "'");
}

std::string_view to_string(LayerType t) noexcept {
  return t == LayerType::kRecurrent ? "recurrent" : "linear";
}

namespace {

template <typename T, typename M>
ParamSlot<T> slot(std::string name, M& m, LayerType type, bool prunable) {
  return {std::move(name), m.values(), m.rows(), m.cols(), type, prunable};
}

template <typename T, typename V>
ParamSlot<T> bias_slot(std::string name, V& v, LayerType type) {
  return {std::move(name), v.values(), 1, v.size(), type, false};
}

// Shared by the const and mutable enumerations.
template <typename T, typename Layers, typename Head>
std::vector<ParamSlot<T>> enumerate(Layers& layers, Head& head) {
  std::vector<ParamSlot<T>> out;
  constexpr auto kRec = LayerType::kRecurrent;
  for (std::size_t i = 0; i < layers.size(); ++i) {
    std::visit(
        [&](auto& layer) {
          const std::string idx = std::to_string(i);
          if constexpr (requires { layer.recurrent_weights; }) {
            const std::string p = "rnn" + idx + ".";
            out.push_back(slot<T>(p + "W_x", layer.input_weights, kRec, true));
            out.push_back(
                slot<T>(p + "W_h", layer.recurrent_weights, kRec, true));
            out.push_back(bias_slot<T>(p + "b", layer.bias, kRec));
          } else {
            static_assert(requires { layer.uz; }, "unexpected layer type");
            const std::string p = "gru" + idx + ".";
            out.push_back(slot<T>(p + "W_z", layer.wz, kRec, true));
            out.push_back(slot<T>(p + "W_r", layer.wr, kRec, true));
            out.push_back(slot<T>(p + "W_c", layer.wc, kRec, true));
            out.push_back(slot<T>(p + "U_z", layer.uz, kRec, true));
            out.push_back(slot<T>(p + "U_r", layer.ur, kRec, true));
            out.push_back(slot<T>(p + "U_c", layer.uc, kRec, true));
            out.push_back(bias_slot<T>(p + "b_z", layer.bz, kRec));
            out.push_back(bias_slot<T>(p + "b_r", layer.br, kRec));
            out.push_back(bias_slot<T>(p + "b_c", layer.bc, kRec));
          }
        },
        layers[i]);
  }
  out.push_back(slot<T>("fc.W", head.weights, LayerType::kLinear, true));
  out.push_back(bias_slot<T>("fc.b", head.bias, LayerType::kLinear));
  return out;
}

}  // namespace

template <typename T>
BasicNetwork<T>::BasicNetwork(const NetworkSpec& spec) : spec_(spec) {
  if (spec.depth == 0 || spec.hidden_size == 0 || spec.input_size == 0 ||
      spec.output_size == 0) {
    throw ParameterError("network dimensions must be positive");
  }
  for (std::size_t i = 0; i < spec.depth; ++i) {
    const std::size_t in = i == 0 ? spec.input_size : spec.hidden_size;
    if (spec.cell == CellType::kRnn) {
      layers_.emplace_back(make_rnn<T>(in, spec.hidden_size, spec.activation));
    } else {
      layers_.emplace_back(make_gru<T>(in, spec.hidden_size));
    }
  }
  head_ = make_fc<T>(spec.hidden_size, spec.output_size);
}

template <typename T>
std::vector<ParamSlot<T>> BasicNetwork<T>::mutable_parameters() {
  ++revision_;
  return enumerate<T>(layers_, head_);
}

template <typename T>
std::vector<ParamSlot<const T>> BasicNetwork<T>::parameters() const {
  return enumerate<const T>(layers_, head_);
}

template <typename T>
std::size_t BasicNetwork<T>::parameter_count() const {
  std::size_t n = 0;
  for (const auto& p : parameters()) n += p.values.size();
  return n;
}

Network init_network(const NetworkSpec& spec, Rng& rng) {
  Network net(spec);
  for (auto& p : net.mutable_parameters()) {
    if (!p.prunable) continue;
    const float bound = 1.0f / std::sqrt(static_cast<float>(p.cols));
    for (float& v : p.values) v = rng.uniform(-bound, bound);
  }
  return net;
}

template <typename T>
ForwardResult<T> forward(const BasicNetwork<T>& net,
                         std::span<const Matrix<T>> inputs) {
  if (inputs.empty()) throw ShapeError("forward: empty sequence");
  const std::size_t batch = inputs.front().rows();
  ForwardResult<T> result;
  NetworkCache<T>& cache = result.cache;
  cache.owner = &net;
  cache.revision = net.revision();
  cache.inputs.assign(inputs.begin(), inputs.end());

  std::span<const Matrix<T>> layer_in(cache.inputs);
  for (const auto& layer : net.layers()) {
    const Matrix<T> h0(batch, net.spec().hidden_size);
    std::visit(
        [&](const auto& l) {
          if constexpr (requires { l.recurrent_weights; }) {
            cache.traces.emplace_back(rnn_forward<T>(l, layer_in, h0));
          } else {
            cache.traces.emplace_back(gru_forward<T>(l, layer_in, h0));
          }
        },
        layer);
    const auto& hidden = std::visit(
        [](const auto& tr) -> const std::vector<Matrix<T>>& {
          return tr.hidden;
        },
        cache.traces.back());
    layer_in = std::span<const Matrix<T>>(hidden).subspan(1);
  }

  if (net.spec().output_mode == OutputMode::kLastStep) {
    cache.head_inputs.push_back(layer_in.back());
  } else {
    cache.head_inputs.assign(layer_in.begin(), layer_in.end());
  }
  for (const auto& h : cache.head_inputs) {
    result.outputs.push_back(fc_forward(net.head(), h));
  }
  return result;
}

template <typename T>
BasicNetwork<T> backprop(const BasicNetwork<T>& net,
                         const NetworkCache<T>& cache,
                         std::span<const Matrix<T>> output_grads) {
  if (cache.owner != &net || cache.revision != net.revision()) {
    throw ContractError(
        "backprop: cache is stale (network modified since forward)");
  }
  if (output_grads.size() != cache.head_inputs.size()) {
    throw ShapeError("backprop: expected " +
                     std::to_string(cache.head_inputs.size()) +
                     " output gradients, got " +
                     std::to_string(output_grads.size()));
  }
  BasicNetwork<T> grads = net.zeros_like();
  auto& grad_layers = grads.mutable_layers();
  auto& grad_head = grads.mutable_head();

  const std::size_t steps = cache.inputs.size();
  const std::size_t batch = cache.inputs.front().rows();
  const std::size_t hidden = net.spec().hidden_size;

  std::vector<Matrix<T>> hidden_grads(steps, Matrix<T>(batch, hidden));
  const std::size_t first = steps - cache.head_inputs.size();
  for (std::size_t k = 0; k < output_grads.size(); ++k) {
    hidden_grads[first + k] = fc_backward(net.head(), cache.head_inputs[k],
                                          output_grads[k], grad_head);
  }

  for (std::size_t i = net.layers().size(); i-- > 0;) {
    std::span<const Matrix<T>> layer_in;
    if (i == 0) {
      layer_in = cache.inputs;
    } else {
      layer_in = std::visit(
          [](const auto& tr) {
            return std::span<const Matrix<T>>(tr.hidden).subspan(1);
          },
          cache.traces[i - 1]);
    }
    RecurrentInputGrads<T> g;
    std::visit(
        [&](const auto& layer) {
          using L = std::remove_cvref_t<decltype(layer)>;
          auto& gl = std::get<L>(grad_layers[i]);
          if constexpr (requires { layer.recurrent_weights; }) {
            g = rnn_backward<T>(layer, std::get<RnnTrace<T>>(cache.traces[i]),
                                layer_in, hidden_grads, gl);
          } else {
            g = gru_backward<T>(layer, std::get<GruTrace<T>>(cache.traces[i]),
                                layer_in, hidden_grads, gl);
          }
        },
        net.layers()[i]);
    hidden_grads = std::move(g.inputs);
  }
  return grads;
}

template <typename T>
LossAndGrad<T> mse_loss(std::span<const Matrix<T>> outputs,
                        const Matrix<T>& targets) {
  if (outputs.size() != 1 || outputs[0].rows() != targets.rows() ||
      outputs[0].cols() != targets.cols()) {
    throw ShapeError("mse_loss: outputs and targets differ in shape");
  }
  const Matrix<T>& y = outputs[0];
  const T inv_batch = T{1} / static_cast<T>(y.rows());
  LossAndGrad<T> out;
  out.grads.emplace_back(y.rows(), y.cols());
  Matrix<T>& g = out.grads[0];
  double total = 0.0;
  for (std::size_t i = 0; i < y.size(); ++i) {
    const T d = y.values()[i] - targets.values()[i];
    total += static_cast<double>(d) * static_cast<double>(d);
    g.values()[i] = T{2} * d * inv_batch;
  }
  out.loss = static_cast<T>(total / static_cast<double>(y.rows()));
  return out;
}

template <typename T>
LossAndGrad<T> softmax_cross_entropy(
    std::span<const Matrix<T>> logits,
    const std::vector<std::vector<std::uint32_t>>& targets) {
  if (logits.size() != targets.size() || logits.empty()) {
    throw ShapeError("softmax_cross_entropy: step count mismatch");
  }
  const std::size_t batch = logits[0].rows();
  const std::size_t classes = logits[0].cols();
  const T inv = T{1} / static_cast<T>(batch * logits.size());
  LossAndGrad<T> out;
  double total = 0.0;
  for (std::size_t s = 0; s < logits.size(); ++s) {
    if (targets[s].size() != batch) {
      throw ShapeError("softmax_cross_entropy: target batch mismatch");
    }
    Matrix<T> g(batch, classes);
    for (std::size_t b = 0; b < batch; ++b) {
      const auto row = logits[s].row(b);
      const std::uint32_t target = targets[s][b];
      if (target >= classes) throw ShapeError("target class out of range");
      T max_logit = -std::numeric_limits<T>::infinity();
      for (T v : row) max_logit = std::max(max_logit, v);
      T denom{};
      for (T v : row) denom += std::exp(v - max_logit);
      const T log_denom = std::log(denom);
      total -= static_cast<double>(row[target] - max_logit - log_denom);
      auto grow = g.row(b);
      for (std::size_t k = 0; k < classes; ++k) {
        grow[k] = std::exp(row[k] - max_logit - log_denom) * inv;
      }
      grow[target] -= inv;
    }
    out.grads.push_back(std::move(g));
  }
  out.loss = static_cast<T>(total * static_cast<double>(inv));
  return out;
}

#define PRNN_INSTANTIATE_NETWORK(T)                                          \
  template class BasicNetwork<T>;                                            \
  template ForwardResult<T> forward<T>(const BasicNetwork<T>&,               \
                                       std::span<const Matrix<T>>);          \
  template BasicNetwork<T> backprop<T>(const BasicNetwork<T>&,               \
                                       const NetworkCache<T>&,               \
                                       std::span<const Matrix<T>>);          \
  template LossAndGrad<T> mse_loss<T>(std::span<const Matrix<T>>,            \
                                      const Matrix<T>&);                     \
  template LossAndGrad<T> softmax_cross_entropy<T>(                          \
      std::span<const Matrix<T>>,                                            \
      const std::vector<std::vector<std::uint32_t>>&);

PRNN_INSTANTIATE_NETWORK(float)
PRNN_INSTANTIATE_NETWORK(double)

#undef PRNN_INSTANTIATE_NETWORK

}  // namespace prnn::nn
