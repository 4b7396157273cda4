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

// Inference-only model in which each weight tensor is stored either dense or
// in CSR form.

#ifndef PRNN_SPARSE_MODEL_HPP_
#define PRNN_SPARSE_MODEL_HPP_

#include <cstdint>
#include <variant>
#include <vector>

#include "prnn/csr.hpp"
#include "prnn/network.hpp"
#include "prnn/tensor.hpp"

namespace prnn::sparse {

enum class LayerKind : std::uint8_t { kRnn = 0, kGru = 1, kFc = 2 };

// Number of tensors a layer of the given kind stores, in serialization order
// (RNN: W_x W_h b; GRU: W_z W_r W_c U_z U_r U_c b_z b_r b_c; FC: W b).
std::size_t tensor_count(LayerKind kind) noexcept;

class StoredTensor {
 public:
  StoredTensor() = default;
  explicit StoredTensor(DenseMatrix m) : data_(std::move(m)) {}
  explicit StoredTensor(CsrMatrix m) : data_(std::move(m)) {}

  bool is_csr() const noexcept {
    return std::holds_alternative<CsrMatrix>(data_);
  }
  std::size_t rows() const noexcept;
  std::size_t cols() const noexcept;
  std::size_t nonzeros() const noexcept;

  const DenseMatrix& dense() const { return std::get<DenseMatrix>(data_); }
  const CsrMatrix& csr() const { return std::get<CsrMatrix>(data_); }
  DenseMatrix to_dense() const;

  // out = T x, dispatching to gemv or spmv.
  void multiply(std::span<const float> x, std::span<float> out) const;

  bool operator==(const StoredTensor&) const = default;

 private:
  std::variant<DenseMatrix, CsrMatrix> data_;
};

struct SparseLayer {
  LayerKind kind = LayerKind::kFc;
  nn::Activation activation = nn::Activation::kIdentity;
  std::uint32_t input_size = 0;
  std::uint32_t output_size = 0;
  std::vector<StoredTensor> tensors;

  bool operator==(const SparseLayer&) const = default;
};

// Selects the storage of each weight tensor when converting a network.
struct StoragePolicy {
  // Prunable tensors whose zero fraction exceeds this are stored as CSR.
  double csr_above_sparsity = 0.5;
};

class SparseModel {
 public:
  SparseModel() = default;
  // Throws ShapeError unless every layer has the right tensor count and
  // shapes, layers chain input to output, and the stack ends in one FC layer.
  explicit SparseModel(std::vector<SparseLayer> layers);

  const std::vector<SparseLayer>& layers() const noexcept { return layers_; }
  std::size_t input_size() const noexcept;
  std::size_t output_size() const noexcept;
  std::size_t parameter_count() const noexcept;
  std::size_t nonzero_count() const noexcept;

  bool operator==(const SparseModel&) const = default;

 private:
  std::vector<SparseLayer> layers_;
};

SparseModel from_network(const nn::Network& net, StoragePolicy policy = {});

// Dense network with the same weights; pruned entries come back as zeros.
nn::Network to_network(const SparseModel& model,
                       nn::OutputMode mode = nn::OutputMode::kEveryStep);

// Runs one sequence through the model with zero initial state and returns
// the head output at every timestep.
std::vector<DenseVector> sparse_forward(const SparseModel& model,
                                        const std::vector<DenseVector>& inputs);

}  // namespace prnn::sparse

#endif  // PRNN_SPARSE_MODEL_HPP_
