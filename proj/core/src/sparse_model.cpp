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

#include "prnn/sparse_model.hpp"

#include <cmath>
#include <string>

namespace prnn::sparse {

std::size_t tensor_count(LayerKind kind) noexcept {
  switch (kind) {
    case LayerKind::kRnn:
      return 3;
    case LayerKind::kGru:
      return 9;
    case LayerKind::kFc:
      return 2;
  }
  return 0;
}

std::size_t StoredTensor::rows() const noexcept {
  return is_csr() ? csr().rows() : dense().rows();
}

std::size_t StoredTensor::cols() const noexcept {
  return is_csr() ? csr().cols() : dense().cols();
}

std::size_t StoredTensor::nonzeros() const noexcept {
  if (is_csr()) return csr().nnz();
  std::size_t n = 0;
  for (float v : dense().values()) n += v != 0.0f;
  return n;
}

DenseMatrix StoredTensor::to_dense() const {
  return is_csr() ? from_csr(csr()) : dense();
}

void StoredTensor::multiply(std::span<const float> x,
                            std::span<float> out) const {
  if (is_csr()) {
    spmv_into(csr(), x, out);
  } else {
    gemv_into(dense(), x, out);
  }
}

namespace {

void expect_shape(const StoredTensor& t, std::size_t rows, std::size_t cols,
                  std::size_t layer, std::size_t index) {
  if (t.rows() != rows || t.cols() != cols) {
    throw ShapeError("layer " + std::to_string(layer) + " tensor " +
                     std::to_string(index) + ": expected " +
                     std::to_string(rows) + "x" + std::to_string(cols) +
                     ", got " + std::to_string(t.rows()) + "x" +
                     std::to_string(t.cols()));
  }
}

}  // namespace

SparseModel::SparseModel(std::vector<SparseLayer> layers)
    : layers_(std::move(layers)) {
  if (layers_.size() < 2) {
    throw ShapeError("sparse model needs a recurrent layer and an FC head");
  }
  for (std::size_t i = 0; i < layers_.size(); ++i) {
    const SparseLayer& l = layers_[i];
    const bool last = i + 1 == layers_.size();
    if ((l.kind == LayerKind::kFc) != last) {
      throw ShapeError("FC layer must appear exactly once, as the last layer");
    }
    if (l.kind != layers_.front().kind && !last) {
      throw ShapeError("recurrent layers must share one cell type");
    }
    if (i > 0 && l.input_size != layers_[i - 1].output_size) {
      throw ShapeError("layer " + std::to_string(i) + " input " +
                       std::to_string(l.input_size) + " != previous output " +
                       std::to_string(layers_[i - 1].output_size));
    }
    if (l.tensors.size() != tensor_count(l.kind)) {
      throw ShapeError("layer " + std::to_string(i) + " has " +
                       std::to_string(l.tensors.size()) + " tensors");
    }
    const std::size_t in = l.input_size;
    const std::size_t out = l.output_size;
    switch (l.kind) {
      case LayerKind::kRnn:
        expect_shape(l.tensors[0], out, in, i, 0);
        expect_shape(l.tensors[1], out, out, i, 1);
        expect_shape(l.tensors[2], 1, out, i, 2);
        break;
      case LayerKind::kGru:
        for (std::size_t k = 0; k < 3; ++k) {
          expect_shape(l.tensors[k], out, in, i, k);
          expect_shape(l.tensors[3 + k], out, out, i, 3 + k);
          expect_shape(l.tensors[6 + k], 1, out, i, 6 + k);
        }
        break;
      case LayerKind::kFc:
        expect_shape(l.tensors[0], out, in, i, 0);
        expect_shape(l.tensors[1], 1, out, i, 1);
        break;
    }
  }
}

std::size_t SparseModel::input_size() const noexcept {
  return layers_.empty() ? 0 : layers_.front().input_size;
}

std::size_t SparseModel::output_size() const noexcept {
  return layers_.empty() ? 0 : layers_.back().output_size;
}

std::size_t SparseModel::parameter_count() const noexcept {
  std::size_t n = 0;
  for (const auto& l : layers_) {
    for (const auto& t : l.tensors) n += t.rows() * t.cols();
  }
  return n;
}

std::size_t SparseModel::nonzero_count() const noexcept {
  std::size_t n = 0;
  for (const auto& l : layers_) {
    for (const auto& t : l.tensors) n += t.nonzeros();
  }
  return n;
}

SparseModel from_network(const nn::Network& net, StoragePolicy policy) {
  const auto params = net.parameters();
  std::vector<SparseLayer> layers;
  std::size_t next = 0;
  auto take = [&](SparseLayer& layer) {
    for (std::size_t k = 0; k < tensor_count(layer.kind); ++k) {
      const auto& p = params.at(next++);
      DenseMatrix m(p.rows, p.cols,
                    std::vector<float>(p.values.begin(), p.values.end()));
      std::size_t zeros = 0;
      for (float v : p.values) zeros += v == 0.0f;
      const double sparsity =
          static_cast<double>(zeros) / static_cast<double>(p.values.size());
      if (p.prunable && sparsity > policy.csr_above_sparsity) {
        layer.tensors.emplace_back(to_csr(m));
      } else {
        layer.tensors.emplace_back(std::move(m));
      }
    }
  };
  const auto& spec = net.spec();
  for (std::size_t i = 0; i < spec.depth; ++i) {
    SparseLayer l;
    l.kind = spec.cell == nn::CellType::kRnn ? LayerKind::kRnn
                                               : LayerKind::kGru;
    l.activation = spec.cell == nn::CellType::kRnn ? spec.activation
                                                   : nn::Activation::kTanh;
    l.input_size =
        static_cast<std::uint32_t>(i == 0 ? spec.input_size : spec.hidden_size);
    l.output_size = static_cast<std::uint32_t>(spec.hidden_size);
    take(l);
    layers.push_back(std::move(l));
  }
  SparseLayer head;
  head.kind = LayerKind::kFc;
  head.activation = nn::Activation::kIdentity;
  head.input_size = static_cast<std::uint32_t>(spec.hidden_size);
  head.output_size = static_cast<std::uint32_t>(spec.output_size);
  take(head);
  layers.push_back(std::move(head));
  return SparseModel(std::move(layers));
}

nn::Network to_network(const SparseModel& model, nn::OutputMode mode) {
  const auto& layers = model.layers();
  nn::NetworkSpec spec;
  spec.cell = layers.front().kind == LayerKind::kRnn ? nn::CellType::kRnn
                                                     : nn::CellType::kGru;
  spec.activation = spec.cell == nn::CellType::kRnn
                        ? layers.front().activation
                        : nn::Activation::kClippedRelu;
  spec.input_size = layers.front().input_size;
  spec.hidden_size = layers.front().output_size;
  spec.depth = layers.size() - 1;
  spec.output_size = layers.back().output_size;
  spec.output_mode = mode;
  nn::Network net(spec);
  auto params = net.mutable_parameters();
  std::size_t next = 0;
  for (const auto& l : layers) {
    for (const auto& t : l.tensors) {
      const DenseMatrix m = t.to_dense();
      auto& p = params.at(next++);
      std::copy(m.values().begin(), m.values().end(), p.values.begin());
    }
  }
  return net;
}

std::vector<DenseVector> sparse_forward(
    const SparseModel& model, const std::vector<DenseVector>& inputs) {
  const auto& layers = model.layers();
  if (layers.empty()) throw ShapeError("sparse_forward: empty model");
  if (inputs.empty()) throw ShapeError("sparse_forward: empty sequence");
  for (const auto& x : inputs) {
    if (x.size() != model.input_size()) {
      throw ShapeError("sparse_forward: input length " +
                       std::to_string(x.size()) + " != model input " +
                       std::to_string(model.input_size()));
    }
  }

  const std::size_t depth = layers.size() - 1;
  std::vector<DenseVector> state;
  for (std::size_t i = 0; i < depth; ++i) {
    state.emplace_back(layers[i].output_size);
  }
  const SparseLayer& head = layers.back();
  std::vector<DenseVector> outputs;
  outputs.reserve(inputs.size());

  for (const auto& x_t : inputs) {
    DenseVector x = x_t;
    for (std::size_t i = 0; i < depth; ++i) {
      const SparseLayer& l = layers[i];
      const std::size_t n = l.output_size;
      DenseVector& h = state[i];
      const auto& ts = l.tensors;
      if (l.kind == LayerKind::kRnn) {
        DenseVector a(n), tmp(n);
        ts[0].multiply(x.values(), a.values());
        ts[1].multiply(h.values(), tmp.values());
        const auto bias = ts[2].to_dense();
        DenseVector next(n);
        for (std::size_t k = 0; k < n; ++k) {
          const float pre = a[k] + tmp[k] + bias.values()[k];
          next[k] = l.activation == nn::Activation::kTanh
                        ? std::tanh(pre)
                        : l.activation == nn::Activation::kClippedRelu
                              ? act::clipped_relu(pre)
                              : pre;
        }
        h = std::move(next);
      } else {
        DenseVector z(n), r(n), c(n), tmp(n);
        const auto bz = ts[6].to_dense();
        const auto br = ts[7].to_dense();
        const auto bc = ts[8].to_dense();
        ts[0].multiply(x.values(), z.values());
        ts[3].multiply(h.values(), tmp.values());
        for (std::size_t k = 0; k < n; ++k) {
          z[k] = act::sigmoid(z[k] + tmp[k] + bz.values()[k]);
        }
        ts[1].multiply(x.values(), r.values());
        ts[4].multiply(h.values(), tmp.values());
        for (std::size_t k = 0; k < n; ++k) {
          r[k] = act::sigmoid(r[k] + tmp[k] + br.values()[k]);
        }
        DenseVector rh(n);
        for (std::size_t k = 0; k < n; ++k) rh[k] = r[k] * h[k];
        ts[2].multiply(x.values(), c.values());
        ts[5].multiply(rh.values(), tmp.values());
        DenseVector next(n);
        for (std::size_t k = 0; k < n; ++k) {
          c[k] = std::tanh(c[k] + tmp[k] + bc.values()[k]);
          next[k] = (1.0f - z[k]) * h[k] + z[k] * c[k];
        }
        h = std::move(next);
      }
      x = h;
    }
    DenseVector y(head.output_size);
    head.tensors[0].multiply(x.values(), y.values());
    const auto hb = head.tensors[1].to_dense();
    for (std::size_t k = 0; k < y.size(); ++k) y[k] += hb.values()[k];
    outputs.push_back(std::move(y));
  }
  return outputs;
}

}  // namespace prnn::sparse
