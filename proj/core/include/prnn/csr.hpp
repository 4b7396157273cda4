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

#ifndef PRNN_CSR_HPP_
#define PRNN_CSR_HPP_

#include <cstdint>
#include <span>
#include <vector>

#include "prnn/tensor.hpp"

namespace prnn::sparse {

// Compressed sparse row matrix with 32-bit offsets and column indices.
//
// Invariants (checked on construction, ParameterError otherwise):
//   row_ptr.size() == rows + 1, row_ptr[0] == 0, row_ptr non-decreasing,
//   row_ptr[rows] == nnz == col_idx.size() == values.size();
//   column indices strictly increasing within a row and < cols;
//   no stored value equals zero.
class CsrMatrix {
 public:
  CsrMatrix() : row_ptr_(1, 0) {}
  CsrMatrix(std::uint32_t rows, std::uint32_t cols,
            std::vector<std::uint32_t> row_ptr,
            std::vector<std::uint32_t> col_idx, std::vector<float> values);

  std::uint32_t rows() const noexcept { return rows_; }
  std::uint32_t cols() const noexcept { return cols_; }
  std::size_t nnz() const noexcept { return values_.size(); }

  const std::vector<std::uint32_t>& row_ptr() const noexcept { return row_ptr_; }
  const std::vector<std::uint32_t>& col_idx() const noexcept { return col_idx_; }
  const std::vector<float>& values() const noexcept { return values_; }

  double sparsity() const noexcept;

  bool operator==(const CsrMatrix&) const = default;

 private:
  std::uint32_t rows_ = 0;
  std::uint32_t cols_ = 0;
  std::vector<std::uint32_t> row_ptr_;
  std::vector<std::uint32_t> col_idx_;
  std::vector<float> values_;
};

// Drops exact zeros (including -0.0). from_csr(to_csr(m)) == m up to the sign
// of zero.
CsrMatrix to_csr(const DenseMatrix& m);
DenseMatrix from_csr(const CsrMatrix& m);

void spmv_into(const CsrMatrix& m, std::span<const float> x,
               std::span<float> out);
DenseVector spmv(const CsrMatrix& m, const DenseVector& x);

// Row-partitioned variants running on `threads` workers. Results are
// identical to the single-threaded kernels since each row is summed by one
// worker in the same order.
void spmv_parallel(const CsrMatrix& m, std::span<const float> x,
                   std::span<float> out, unsigned threads);
void gemv_parallel(const DenseMatrix& m, std::span<const float> x,
                   std::span<float> out, unsigned threads);

}  // namespace prnn::sparse

#endif  // PRNN_CSR_HPP_
