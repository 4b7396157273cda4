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

#include "prnn/csr.hpp"

#include <algorithm>
#include <string>
#include <thread>

namespace prnn::sparse {

CsrMatrix::CsrMatrix(std::uint32_t rows, std::uint32_t cols,
                     std::vector<std::uint32_t> row_ptr,
                     std::vector<std::uint32_t> col_idx,
                     std::vector<float> values)
    : rows_(rows),
      cols_(cols),
      row_ptr_(std::move(row_ptr)),
      col_idx_(std::move(col_idx)),
      values_(std::move(values)) {
  if (row_ptr_.size() != static_cast<std::size_t>(rows_) + 1) {
    throw ParameterError("csr: row_ptr must have rows + 1 entries");
  }
  if (row_ptr_.front() != 0) throw ParameterError("csr: row_ptr[0] != 0");
  if (col_idx_.size() != values_.size() || row_ptr_.back() != values_.size()) {
    throw ParameterError("csr: row_ptr[rows], col_idx and values disagree on nnz");
  }
  for (std::uint32_t r = 0; r < rows_; ++r) {
    const std::uint32_t begin = row_ptr_[r];
    const std::uint32_t end = row_ptr_[r + 1];
    if (end < begin) throw ParameterError("csr: row_ptr decreases at row " +
                                          std::to_string(r));
    for (std::uint32_t k = begin; k < end; ++k) {
      if (col_idx_[k] >= cols_) {
        throw ParameterError("csr: column index out of range in row " +
                             std::to_string(r));
      }
      if (k > begin && col_idx_[k] <= col_idx_[k - 1]) {
        throw ParameterError("csr: column indices not strictly increasing in "
                             "row " + std::to_string(r));
      }
      if (values_[k] == 0.0f) {
        throw ParameterError("csr: explicit zero stored in row " +
                             std::to_string(r));
      }
    }
  }
}

double CsrMatrix::sparsity() const noexcept {
  const double total = static_cast<double>(rows_) * static_cast<double>(cols_);
  return total == 0.0 ? 0.0 : 1.0 - static_cast<double>(nnz()) / total;
}

CsrMatrix to_csr(const DenseMatrix& m) {
  std::vector<std::uint32_t> row_ptr(m.rows() + 1, 0);
  std::vector<std::uint32_t> col_idx;
  std::vector<float> values;
  for (std::size_t r = 0; r < m.rows(); ++r) {
    const auto row = m.row(r);
    for (std::size_t c = 0; c < row.size(); ++c) {
      if (row[c] != 0.0f) {
        col_idx.push_back(static_cast<std::uint32_t>(c));
        values.push_back(row[c]);
      }
    }
    row_ptr[r + 1] = static_cast<std::uint32_t>(values.size());
  }
  return CsrMatrix(static_cast<std::uint32_t>(m.rows()),
                   static_cast<std::uint32_t>(m.cols()), std::move(row_ptr),
                   std::move(col_idx), std::move(values));
}

DenseMatrix from_csr(const CsrMatrix& m) {
  DenseMatrix out(m.rows(), m.cols());
  for (std::uint32_t r = 0; r < m.rows(); ++r) {
    for (std::uint32_t k = m.row_ptr()[r]; k < m.row_ptr()[r + 1]; ++k) {
      out(r, m.col_idx()[k]) = m.values()[k];
    }
  }
  return out;
}

namespace {

void spmv_rows(const CsrMatrix& m, const float* x, float* out,
               std::uint32_t first, std::uint32_t last) noexcept {
  const std::uint32_t* rp = m.row_ptr().data();
  const std::uint32_t* ci = m.col_idx().data();
  const float* v = m.values().data();
  for (std::uint32_t r = first; r < last; ++r) {
    float sum = 0.0f;
    for (std::uint32_t k = rp[r]; k < rp[r + 1]; ++k) sum += v[k] * x[ci[k]];
    out[r] = sum;
  }
}

template <typename Fn>
void for_row_blocks(std::size_t rows, unsigned threads, Fn&& fn) {
  threads = std::max(1u, std::min<unsigned>(threads, rows == 0 ? 1 : rows));
  if (threads == 1) {
    fn(std::size_t{0}, rows);
    return;
  }
  std::vector<std::jthread> workers;
  const std::size_t chunk = (rows + threads - 1) / threads;
  for (unsigned t = 0; t < threads; ++t) {
    const std::size_t first = t * chunk;
    const std::size_t last = std::min(rows, first + chunk);
    if (first >= last) break;
    workers.emplace_back([&fn, first, last] { fn(first, last); });
  }
}

}  // namespace

void spmv_into(const CsrMatrix& m, std::span<const float> x,
               std::span<float> out) {
  if (x.size() != m.cols() || out.size() != m.rows()) {
    throw ShapeError("spmv: matrix " + std::to_string(m.rows()) + "x" +
                     std::to_string(m.cols()) + ", vector " +
                     std::to_string(x.size()));
  }
  spmv_rows(m, x.data(), out.data(), 0, m.rows());
}

DenseVector spmv(const CsrMatrix& m, const DenseVector& x) {
  DenseVector out(m.rows());
  spmv_into(m, x.values(), out.values());
  return out;
}

void spmv_parallel(const CsrMatrix& m, std::span<const float> x,
                   std::span<float> out, unsigned threads) {
  if (x.size() != m.cols() || out.size() != m.rows()) {
    throw ShapeError("spmv: dimension mismatch");
  }
  for_row_blocks(m.rows(), threads, [&](std::size_t first, std::size_t last) {
    spmv_rows(m, x.data(), out.data(), static_cast<std::uint32_t>(first),
              static_cast<std::uint32_t>(last));
  });
}

void gemv_parallel(const DenseMatrix& m, std::span<const float> x,
                   std::span<float> out, unsigned threads) {
  if (x.size() != m.cols() || out.size() != m.rows()) {
    throw ShapeError("gemv: dimension mismatch");
  }
  for_row_blocks(m.rows(), threads, [&](std::size_t first, std::size_t last) {
    for (std::size_t r = first; r < last; ++r) out[r] = dot(m.row(r), x);
  });
}

}  // namespace prnn::sparse
