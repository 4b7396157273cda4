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

// Binary model format. All integers little-endian, floats IEEE-754 binary32.
//
//   file    := magic "SPRN" | version u16 (= 1) | layer_count u32 | layer*
//   layer   := kind u8 (0 RNN, 1 GRU, 2 FC) | activation u8 (0 identity,
//              1 clipped ReLU, 2 tanh) | input u32 | output u32 | tensor*
//   tensor  := storage u8 | rows u32 | cols u32 | payload
//   payload := storage 0: rows*cols f32, row-major
//              storage 1: nnz u32 | row_ptr (rows+1) u32 | col_idx nnz u32
//                         | values nnz f32
//
// The number of tensors per layer is fixed by its kind (see tensor_count).
// Sizes in bytes are therefore exact:
//
//   dense tensor = 9 + 4 * rows * cols
//   CSR tensor   = 13 + 4 * (rows + 1) + 8 * nnz

#ifndef PRNN_SERIALIZE_HPP_
#define PRNN_SERIALIZE_HPP_

#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

#include "prnn/sparse_model.hpp"

namespace prnn::sparse {

inline constexpr char kMagic[4] = {'S', 'P', 'R', 'N'};
inline constexpr std::uint16_t kFormatVersion = 1;
inline constexpr std::size_t kFileHeaderBytes = 4 + 2 + 4;
inline constexpr std::size_t kLayerHeaderBytes = 1 + 1 + 4 + 4;
inline constexpr std::size_t kTensorHeaderBytes = 1 + 4 + 4;
inline constexpr std::size_t kCsrHeaderBytes = kTensorHeaderBytes + 4;

std::vector<std::uint8_t> serialize(const SparseModel& model);

// Throws FormatError (with the failing byte offset) on bad magic, unsupported
// version, unknown tags, truncation, trailing bytes, or CSR/shape invariant
// violations.
SparseModel deserialize(std::span<const std::uint8_t> bytes);

std::size_t dense_tensor_bytes(std::size_t rows, std::size_t cols) noexcept;
std::size_t csr_tensor_bytes(std::size_t rows, std::size_t nnz) noexcept;
std::size_t serialized_size(const StoredTensor& t) noexcept;
std::size_t serialized_size(const SparseModel& model) noexcept;
// Size the model would take with every tensor stored dense.
std::size_t dense_equivalent_size(const SparseModel& model) noexcept;

void write_model(const std::filesystem::path& path, const SparseModel& model);
SparseModel read_model(const std::filesystem::path& path);

}  // namespace prnn::sparse

#endif  // PRNN_SERIALIZE_HPP_
