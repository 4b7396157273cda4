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

#include "prnn/layers.hpp"

#include <cmath>
#include <string>

namespace prnn::nn {

std::string_view to_string(Activation a) noexcept {
  switch (a) {
    case Activation::kIdentity:
      return "identity";
    case Activation::kClippedRelu:
      return "clipped_relu";
    case Activation::kTanh:
      return "tanh";
  }
  return "unknown";
}

Activation parse_activation(std::string_view name) {
  if (name == "clipped_relu" || name == "relu") return Activation::kClippedRelu;
  if (name == "tanh") return Activation::kTanh;
  if (name == "identity") return Activation::kIdentity;
  throw ParameterError("unknown activation '" + std::string(name) + "'");
}

namespace {

template <typename T>
void require_shape(const Matrix<T>& m, std::size_t rows, std::size_t cols,
                   const char* what) {
  if (m.rows() != rows || m.cols() != cols) {
    throw ShapeError(std::string(what) + ": expected " + std::to_string(rows) +
                     "x" + std::to_string(cols) + ", got " +
                     std::to_string(m.rows()) + "x" + std::to_string(m.cols()));
  }
}

template <typename T>
void require_len(const Vector<T>& v, std::size_t len, const char* what) {
  if (v.size() != len) {
    throw ShapeError(std::string(what) + ": expected length " +
                     std::to_string(len) + ", got " + std::to_string(v.size()));
  }
}

template <typename T>
std::size_t check_sequence(std::span<const Matrix<T>> inputs,
                           const Matrix<T>& h0, std::size_t input,
                           std::size_t hidden) {
  if (inputs.empty()) throw ShapeError("recurrent forward: empty sequence");
  const std::size_t batch = h0.rows();
  require_shape(h0, batch, hidden, "h0");
  for (const auto& x : inputs) require_shape(x, batch, input, "input step");
  return batch;
}

template <typename T>
void apply_activation(Activation a, std::span<const T> in, std::span<T> out) {
  for (std::size_t i = 0; i < in.size(); ++i) {
    switch (a) {
      case Activation::kClippedRelu:
        out[i] = act::clipped_relu(in[i]);
        break;
      case Activation::kTanh:
        out[i] = std::tanh(in[i]);
        break;
      case Activation::kIdentity:
        out[i] = in[i];
        break;
    }
  }
}

template <typename T>
void add_column_sums(const Matrix<T>& g, Vector<T>& acc) {
  for (std::size_t b = 0; b < g.rows(); ++b) {
    axpy(T{1}, g.row(b), acc.values());
  }
}

template <typename T>
std::vector<Matrix<T>> as_batches(const std::vector<Vector<T>>& seq) {
  std::vector<Matrix<T>> out;
  out.reserve(seq.size());
  for (const auto& v : seq) out.emplace_back(1, v.size(), v.data());
  return out;
}

}  // namespace

template <typename T>
void BasicRnnLayer<T>::validate() const {
  const std::size_t h = hidden_size();
  require_shape(recurrent_weights, h, h, "rnn recurrent_weights");
  require_len(bias, h, "rnn bias");
}

template <typename T>
void BasicGruLayer<T>::validate() const {
  const std::size_t h = hidden_size();
  const std::size_t in = input_size();
  require_shape(wr, h, in, "gru wr");
  require_shape(wc, h, in, "gru wc");
  require_shape(uz, h, h, "gru uz");
  require_shape(ur, h, h, "gru ur");
  require_shape(uc, h, h, "gru uc");
  require_len(bz, h, "gru bz");
  require_len(br, h, "gru br");
  require_len(bc, h, "gru bc");
}

template <typename T>
void BasicFcLayer<T>::validate() const {
  require_len(bias, output_size(), "fc bias");
}

template <typename T>
BasicRnnLayer<T> make_rnn(std::size_t input, std::size_t hidden,
                          Activation activation) {
  return {Matrix<T>(hidden, input), Matrix<T>(hidden, hidden),
          Vector<T>(hidden), activation};
}

template <typename T>
BasicGruLayer<T> make_gru(std::size_t input, std::size_t hidden) {
  BasicGruLayer<T> g;
  g.wz = g.wr = g.wc = Matrix<T>(hidden, input);
  g.uz = g.ur = g.uc = Matrix<T>(hidden, hidden);
  g.bz = g.br = g.bc = Vector<T>(hidden);
  return g;
}

template <typename T>
BasicFcLayer<T> make_fc(std::size_t input, std::size_t output) {
  return {Matrix<T>(output, input), Vector<T>(output)};
}

template <typename T>
RnnTrace<T> rnn_forward(const BasicRnnLayer<T>& layer,
                        std::span<const Matrix<T>> inputs,
                        const Matrix<T>& h0) {
  layer.validate();
  const std::size_t hidden = layer.hidden_size();
  const std::size_t batch =
      check_sequence(inputs, h0, layer.input_size(), hidden);

  RnnTrace<T> trace;
  trace.hidden.reserve(inputs.size() + 1);
  trace.preact.reserve(inputs.size());
  trace.hidden.push_back(h0);
  for (const auto& x : inputs) {
    Matrix<T> a(batch, hidden);
    matmul_nt_acc(x, layer.input_weights, a);
    matmul_nt_acc(trace.hidden.back(), layer.recurrent_weights, a);
    add_row_bias(layer.bias, a);
    Matrix<T> h(batch, hidden);
    apply_activation<T>(layer.activation, a.values(), h.values());
    trace.preact.push_back(std::move(a));
    trace.hidden.push_back(std::move(h));
  }
  return trace;
}

template <typename T>
RecurrentInputGrads<T> rnn_backward(const BasicRnnLayer<T>& layer,
                                    const RnnTrace<T>& trace,
                                    std::span<const Matrix<T>> inputs,
                                    std::span<const Matrix<T>> hidden_grads,
                                    BasicRnnLayer<T>& grads) {
  const std::size_t steps = inputs.size();
  if (trace.preact.size() != steps || hidden_grads.size() != steps) {
    throw ShapeError("rnn_backward: trace/input/gradient lengths differ");
  }
  const std::size_t hidden = layer.hidden_size();
  const std::size_t batch = trace.hidden.front().rows();

  RecurrentInputGrads<T> out;
  out.inputs.resize(steps);
  Matrix<T> carry(batch, hidden);
  for (std::size_t s = steps; s-- > 0;) {
    require_shape(hidden_grads[s], batch, hidden, "rnn hidden grad");
    Matrix<T> da(batch, hidden);
    const auto pre = trace.preact[s].values();
    const auto h = trace.hidden[s + 1].values();
    const auto g_up = hidden_grads[s].values();
    const auto g_rec = carry.values();
    auto d = da.values();
    for (std::size_t i = 0; i < d.size(); ++i) {
      const T g = g_up[i] + g_rec[i];
      T slope{1};
      if (layer.activation == Activation::kClippedRelu) {
        slope = act::clipped_relu_grad(pre[i]);
      } else if (layer.activation == Activation::kTanh) {
        slope = T{1} - h[i] * h[i];
      }
      d[i] = g * slope;
    }
    matmul_tn_acc(da, inputs[s], grads.input_weights);
    matmul_tn_acc(da, trace.hidden[s], grads.recurrent_weights);
    add_column_sums(da, grads.bias);

    Matrix<T> dx(batch, layer.input_size());
    matmul_nn_acc(da, layer.input_weights, dx);
    out.inputs[s] = std::move(dx);

    Matrix<T> next(batch, hidden);
    matmul_nn_acc(da, layer.recurrent_weights, next);
    carry = std::move(next);
  }
  out.h0 = std::move(carry);
  return out;
}

template <typename T>
GruTrace<T> gru_forward(const BasicGruLayer<T>& layer,
                        std::span<const Matrix<T>> inputs,
                        const Matrix<T>& h0) {
  layer.validate();
  const std::size_t hidden = layer.hidden_size();
  const std::size_t batch =
      check_sequence(inputs, h0, layer.input_size(), hidden);

  GruTrace<T> trace;
  trace.hidden.reserve(inputs.size() + 1);
  trace.hidden.push_back(h0);
  for (const auto& x : inputs) {
    const Matrix<T>& hp = trace.hidden.back();
    Matrix<T> z(batch, hidden), r(batch, hidden), c(batch, hidden);
    matmul_nt_acc(x, layer.wz, z);
    matmul_nt_acc(hp, layer.uz, z);
    add_row_bias(layer.bz, z);
    matmul_nt_acc(x, layer.wr, r);
    matmul_nt_acc(hp, layer.ur, r);
    add_row_bias(layer.br, r);
    for (T& v : z.values()) v = act::sigmoid(v);
    for (T& v : r.values()) v = act::sigmoid(v);

    Matrix<T> rh(batch, hidden);
    for (std::size_t i = 0; i < rh.size(); ++i) {
      rh.values()[i] = r.values()[i] * hp.values()[i];
    }
    matmul_nt_acc(x, layer.wc, c);
    matmul_nt_acc(rh, layer.uc, c);
    add_row_bias(layer.bc, c);
    for (T& v : c.values()) v = std::tanh(v);

    Matrix<T> h(batch, hidden);
    for (std::size_t i = 0; i < h.size(); ++i) {
      const T zi = z.values()[i];
      h.values()[i] = (T{1} - zi) * hp.values()[i] + zi * c.values()[i];
    }
    trace.z.push_back(std::move(z));
    trace.r.push_back(std::move(r));
    trace.c.push_back(std::move(c));
    trace.hidden.push_back(std::move(h));
  }
  return trace;
}

template <typename T>
RecurrentInputGrads<T> gru_backward(const BasicGruLayer<T>& layer,
                                    const GruTrace<T>& trace,
                                    std::span<const Matrix<T>> inputs,
                                    std::span<const Matrix<T>> hidden_grads,
                                    BasicGruLayer<T>& grads) {
  const std::size_t steps = inputs.size();
  if (trace.z.size() != steps || hidden_grads.size() != steps) {
    throw ShapeError("gru_backward: trace/input/gradient lengths differ");
  }
  const std::size_t hidden = layer.hidden_size();
  const std::size_t batch = trace.hidden.front().rows();
  const std::size_t n = batch * hidden;

  RecurrentInputGrads<T> out;
  out.inputs.resize(steps);
  Matrix<T> carry(batch, hidden);
  for (std::size_t s = steps; s-- > 0;) {
    require_shape(hidden_grads[s], batch, hidden, "gru hidden grad");
    const auto hp = trace.hidden[s].values();
    const auto z = trace.z[s].values();
    const auto r = trace.r[s].values();
    const auto c = trace.c[s].values();

    Matrix<T> daz(batch, hidden), dac(batch, hidden), dhp(batch, hidden);
    for (std::size_t i = 0; i < n; ++i) {
      const T g = hidden_grads[s].values()[i] + carry.values()[i];
      daz.values()[i] = g * (c[i] - hp[i]) * z[i] * (T{1} - z[i]);
      dac.values()[i] = g * z[i] * (T{1} - c[i] * c[i]);
      dhp.values()[i] = g * (T{1} - z[i]);
    }

    Matrix<T> rh(batch, hidden);
    for (std::size_t i = 0; i < n; ++i) rh.values()[i] = r[i] * hp[i];

    // Candidate path: d(r*h) = dac * U_c.
    Matrix<T> drh(batch, hidden);
    matmul_nn_acc(dac, layer.uc, drh);
    Matrix<T> dar(batch, hidden);
    for (std::size_t i = 0; i < n; ++i) {
      const T g = drh.values()[i];
      dar.values()[i] = g * hp[i] * r[i] * (T{1} - r[i]);
      dhp.values()[i] += g * r[i];
    }

    const Matrix<T>& x = inputs[s];
    const Matrix<T>& hprev = trace.hidden[s];
    matmul_tn_acc(daz, x, grads.wz);
    matmul_tn_acc(dar, x, grads.wr);
    matmul_tn_acc(dac, x, grads.wc);
    matmul_tn_acc(daz, hprev, grads.uz);
    matmul_tn_acc(dar, hprev, grads.ur);
    matmul_tn_acc(dac, rh, grads.uc);
    add_column_sums(daz, grads.bz);
    add_column_sums(dar, grads.br);
    add_column_sums(dac, grads.bc);

    Matrix<T> dx(batch, layer.input_size());
    matmul_nn_acc(daz, layer.wz, dx);
    matmul_nn_acc(dar, layer.wr, dx);
    matmul_nn_acc(dac, layer.wc, dx);
    out.inputs[s] = std::move(dx);

    matmul_nn_acc(daz, layer.uz, dhp);
    matmul_nn_acc(dar, layer.ur, dhp);
    carry = std::move(dhp);
  }
  out.h0 = std::move(carry);
  return out;
}

template <typename T>
std::vector<Vector<T>> rnn_forward(const BasicRnnLayer<T>& layer,
                                   const std::vector<Vector<T>>& inputs,
                                   const Vector<T>& h0) {
  const auto batches = as_batches(inputs);
  const auto trace = rnn_forward<T>(layer, std::span<const Matrix<T>>(batches),
                                    Matrix<T>(1, h0.size(), h0.data()));
  std::vector<Vector<T>> out;
  for (std::size_t t = 1; t < trace.hidden.size(); ++t) {
    out.emplace_back(trace.hidden[t].data());
  }
  return out;
}

template <typename T>
std::vector<Vector<T>> gru_forward(const BasicGruLayer<T>& layer,
                                   const std::vector<Vector<T>>& inputs,
                                   const Vector<T>& h0) {
  const auto batches = as_batches(inputs);
  const auto trace = gru_forward<T>(layer, std::span<const Matrix<T>>(batches),
                                    Matrix<T>(1, h0.size(), h0.data()));
  std::vector<Vector<T>> out;
  for (std::size_t t = 1; t < trace.hidden.size(); ++t) {
    out.emplace_back(trace.hidden[t].data());
  }
  return out;
}

template <typename T>
Matrix<T> fc_forward(const BasicFcLayer<T>& layer, const Matrix<T>& x) {
  layer.validate();
  require_shape(x, x.rows(), layer.input_size(), "fc input");
  Matrix<T> y(x.rows(), layer.output_size());
  matmul_nt_acc(x, layer.weights, y);
  add_row_bias(layer.bias, y);
  return y;
}

template <typename T>
Matrix<T> fc_backward(const BasicFcLayer<T>& layer, const Matrix<T>& x,
                      const Matrix<T>& out_grad, BasicFcLayer<T>& grads) {
  require_shape(out_grad, x.rows(), layer.output_size(), "fc output grad");
  matmul_tn_acc(out_grad, x, grads.weights);
  add_column_sums(out_grad, grads.bias);
  Matrix<T> dx(x.rows(), layer.input_size());
  matmul_nn_acc(out_grad, layer.weights, dx);
  return dx;
}

#define PRNN_INSTANTIATE_LAYERS(T)                                           \
  template struct BasicRnnLayer<T>;                                          \
  template struct BasicGruLayer<T>;                                          \
  template struct BasicFcLayer<T>;                                           \
  template BasicRnnLayer<T> make_rnn<T>(std::size_t, std::size_t,            \
                                        Activation);                         \
  template BasicGruLayer<T> make_gru<T>(std::size_t, std::size_t);           \
  template BasicFcLayer<T> make_fc<T>(std::size_t, std::size_t);             \
  template RnnTrace<T> rnn_forward<T>(const BasicRnnLayer<T>&,               \
                                      std::span<const Matrix<T>>,            \
                                      const Matrix<T>&);                     \
  template GruTrace<T> gru_forward<T>(const BasicGruLayer<T>&,               \
                                      std::span<const Matrix<T>>,            \
                                      const Matrix<T>&);                     \
  template std::vector<Vector<T>> rnn_forward<T>(                            \
      const BasicRnnLayer<T>&, const std::vector<Vector<T>>&,                \
      const Vector<T>&);                                                     \
  template std::vector<Vector<T>> gru_forward<T>(                            \
      const BasicGruLayer<T>&, const std::vector<Vector<T>>&,                \
      const Vector<T>&);                                                     \
  template RecurrentInputGrads<T> rnn_backward<T>(                           \
      const BasicRnnLayer<T>&, const RnnTrace<T>&,                           \
      std::span<const Matrix<T>>, std::span<const Matrix<T>>,                \
      BasicRnnLayer<T>&);                                                    \
  template RecurrentInputGrads<T> gru_backward<T>(                           \
      const BasicGruLayer<T>&, const GruTrace<T>&,                           \
      std::span<const Matrix<T>>, std::span<const Matrix<T>>,                \
      BasicGruLayer<T>&);                                                    \
  template Matrix<T> fc_forward<T>(const BasicFcLayer<T>&, const Matrix<T>&); \
  template Matrix<T> fc_backward<T>(const BasicFcLayer<T>&, const Matrix<T>&, \
                                    const Matrix<T>&, BasicFcLayer<T>&);

PRNN_INSTANTIATE_LAYERS(float)
PRNN_INSTANTIATE_LAYERS(double)

#undef PRNN_INSTANTIATE_LAYERS

}  // namespace prnn::nn
