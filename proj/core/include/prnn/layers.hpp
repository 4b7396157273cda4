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

// Recurrent and fully connected layers with explicit forward traces and
// hand-written backward passes (backpropagation through time).
//
// All batched operands are row-major B x features matrices, one per
// timestep. Conventions:
//
//   RNN:  h_t = act(W_x x_t + W_h h_{t-1} + b)
//
//   GRU:  z_t = sigmoid(W_z x_t + U_z h_{t-1} + b_z)          update gate
//         r_t = sigmoid(W_r x_t + U_r h_{t-1} + b_r)          reset gate
//         c_t = tanh(W_c x_t + U_c (r_t * h_{t-1}) + b_c)     candidate
//         h_t = (1 - z_t) * h_{t-1} + z_t * c_t
//
//   FC:   y = W x + b

#ifndef PRNN_LAYERS_HPP_
#define PRNN_LAYERS_HPP_

#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

#include "prnn/tensor.hpp"

namespace prnn::nn {

enum class Activation : std::uint8_t {
  kIdentity = 0,
  kClippedRelu = 1,
  kTanh = 2,
};

std::string_view to_string(Activation a) noexcept;
// Throws ParameterError for unknown names.
Activation parse_activation(std::string_view name);

template <typename T>
struct BasicRnnLayer {
  Matrix<T> input_weights;      // hidden x input
  Matrix<T> recurrent_weights;  // hidden x hidden
  Vector<T> bias;               // hidden
  Activation activation = Activation::kClippedRelu;

  std::size_t input_size() const noexcept { return input_weights.cols(); }
  std::size_t hidden_size() const noexcept { return input_weights.rows(); }
  void validate() const;
};

template <typename T>
struct BasicGruLayer {
  Matrix<T> wz, wr, wc;  // hidden x input
  Matrix<T> uz, ur, uc;  // hidden x hidden
  Vector<T> bz, br, bc;  // hidden

  std::size_t input_size() const noexcept { return wz.cols(); }
  std::size_t hidden_size() const noexcept { return wz.rows(); }
  void validate() const;
};

template <typename T>
struct BasicFcLayer {
  Matrix<T> weights;  // out x in
  Vector<T> bias;     // out

  std::size_t input_size() const noexcept { return weights.cols(); }
  std::size_t output_size() const noexcept { return weights.rows(); }
  void validate() const;
};

using RnnLayer = BasicRnnLayer<float>;
using GruLayer = BasicGruLayer<float>;
using FcLayer = BasicFcLayer<float>;

// Zero-filled layer with the given dimensions.
template <typename T>
BasicRnnLayer<T> make_rnn(std::size_t input, std::size_t hidden,
                          Activation activation);
template <typename T>
BasicGruLayer<T> make_gru(std::size_t input, std::size_t hidden);
template <typename T>
BasicFcLayer<T> make_fc(std::size_t input, std::size_t output);

template <typename T>
struct RnnTrace {
  std::vector<Matrix<T>> hidden;  // hidden[0] = h0; hidden[t + 1] after step t
  std::vector<Matrix<T>> preact;  // preact[t] = W_x x_t + W_h h_t + b
};

template <typename T>
struct GruTrace {
  std::vector<Matrix<T>> hidden;  // hidden[0] = h0
  std::vector<Matrix<T>> z, r, c;
};

// Gradients flowing out of a recurrent layer's backward pass.
template <typename T>
struct RecurrentInputGrads {
  std::vector<Matrix<T>> inputs;  // dL/dx_t
  Matrix<T> h0;                   // dL/dh0
};

// inputs: T >= 1 matrices of shape B x input; h0: B x hidden.
template <typename T>
RnnTrace<T> rnn_forward(const BasicRnnLayer<T>& layer,
                        std::span<const Matrix<T>> inputs,
                        const Matrix<T>& h0);

template <typename T>
GruTrace<T> gru_forward(const BasicGruLayer<T>& layer,
                        std::span<const Matrix<T>> inputs,
                        const Matrix<T>& h0);

// Single-sequence conveniences; return h_1..h_T.
template <typename T>
std::vector<Vector<T>> rnn_forward(const BasicRnnLayer<T>& layer,
                                   const std::vector<Vector<T>>& inputs,
                                   const Vector<T>& h0);
template <typename T>
std::vector<Vector<T>> gru_forward(const BasicGruLayer<T>& layer,
                                   const std::vector<Vector<T>>& inputs,
                                   const Vector<T>& h0);

// hidden_grads[t] is dL/dh_{t+1} coming from above (the layer's own
// recurrence is handled internally). Parameter gradients are accumulated
// into `grads`, which must have the layer's shapes.
template <typename T>
RecurrentInputGrads<T> rnn_backward(const BasicRnnLayer<T>& layer,
                                    const RnnTrace<T>& trace,
                                    std::span<const Matrix<T>> inputs,
                                    std::span<const Matrix<T>> hidden_grads,
                                    BasicRnnLayer<T>& grads);

template <typename T>
RecurrentInputGrads<T> gru_backward(const BasicGruLayer<T>& layer,
                                    const GruTrace<T>& trace,
                                    std::span<const Matrix<T>> inputs,
                                    std::span<const Matrix<T>> hidden_grads,
                                    BasicGruLayer<T>& grads);

template <typename T>
Matrix<T> fc_forward(const BasicFcLayer<T>& layer, const Matrix<T>& x);

// Returns dL/dx and accumulates into grads.
template <typename T>
Matrix<T> fc_backward(const BasicFcLayer<T>& layer, const Matrix<T>& x,
                      const Matrix<T>& out_grad, BasicFcLayer<T>& grads);

}  // namespace prnn::nn

#endif  // PRNN_LAYERS_HPP_
