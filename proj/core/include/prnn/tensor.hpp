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

// Dense row-major matrices and vectors plus the handful of kernels the
// recurrent layers and the benchmarks need. Everything is templated on the
// scalar type; float is the working precision, double is instantiated for
// finite-difference gradient checks.

#ifndef PRNN_TENSOR_HPP_
#define PRNN_TENSOR_HPP_

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <initializer_list>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "prnn/errors.hpp"
#include "prnn/rng.hpp"

namespace prnn {

template <typename T>
class Vector {
 public:
  Vector() = default;
  explicit Vector(std::size_t len, T fill = T{}) : data_(len, fill) {}
  explicit Vector(std::vector<T> data) : data_(std::move(data)) {}
  Vector(std::initializer_list<T> values) : data_(values) {}

  std::size_t size() const noexcept { return data_.size(); }
  bool empty() const noexcept { return data_.empty(); }

  T& operator[](std::size_t i) { return data_[i]; }
  const T& operator[](std::size_t i) const { return data_[i]; }

  std::span<T> values() noexcept { return data_; }
  std::span<const T> values() const noexcept { return data_; }
  const std::vector<T>& data() const noexcept { return data_; }

  void fill(T v) { std::fill(data_.begin(), data_.end(), v); }

  bool operator==(const Vector&) const = default;

 private:
  std::vector<T> data_;
};

template <typename T>
class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols, T fill = T{})
      : rows_(rows), cols_(cols), data_(rows * cols, fill) {}
  Matrix(std::size_t rows, std::size_t cols, std::vector<T> data)
      : rows_(rows), cols_(cols), data_(std::move(data)) {
    if (data_.size() != rows_ * cols_) {
      throw ShapeError("matrix data length " + std::to_string(data_.size()) +
                       " != " + std::to_string(rows_) + "x" +
                       std::to_string(cols_));
    }
  }

  static Matrix from_rows(std::initializer_list<std::initializer_list<T>> rows) {
    const std::size_t r = rows.size();
    const std::size_t c = r == 0 ? 0 : rows.begin()->size();
    std::vector<T> data;
    data.reserve(r * c);
    for (const auto& row : rows) {
      if (row.size() != c) throw ShapeError("ragged row list");
      data.insert(data.end(), row.begin(), row.end());
    }
    return Matrix(r, c, std::move(data));
  }

  static Matrix identity(std::size_t n) {
    Matrix m(n, n);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = T{1};
    return m;
  }

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }
  std::size_t size() const noexcept { return data_.size(); }

  T& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
  const T& operator()(std::size_t r, std::size_t c) const {
    return data_[r * cols_ + c];
  }

  std::span<T> row(std::size_t r) noexcept {
    return {data_.data() + r * cols_, cols_};
  }
  std::span<const T> row(std::size_t r) const noexcept {
    return {data_.data() + r * cols_, cols_};
  }

  std::span<T> values() noexcept { return data_; }
  std::span<const T> values() const noexcept { return data_; }
  const std::vector<T>& data() const noexcept { return data_; }

  void fill(T v) { std::fill(data_.begin(), data_.end(), v); }

  bool operator==(const Matrix&) const = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<T> data_;
};

using DenseMatrix = Matrix<float>;
using DenseVector = Vector<float>;

// Eight independent partial sums in a fixed order: vectorizes without
// -ffast-math and is bit-reproducible for a given build.
template <typename T>
T dot(std::span<const T> a, std::span<const T> b) noexcept {
  const std::size_t n = a.size();
  const T* pa = a.data();
  const T* pb = b.data();
  T acc[8] = {};
  std::size_t i = 0;
  for (; i + 8 <= n; i += 8) {
    for (std::size_t k = 0; k < 8; ++k) acc[k] += pa[i + k] * pb[i + k];
  }
  T tail{};
  for (; i < n; ++i) tail += pa[i] * pb[i];
  return ((acc[0] + acc[4]) + (acc[1] + acc[5])) +
         ((acc[2] + acc[6]) + (acc[3] + acc[7])) + tail;
}

template <typename T>
void axpy(T alpha, std::span<const T> x, std::span<T> y) noexcept {
  const std::size_t n = x.size();
  const T* px = x.data();
  T* py = y.data();
  for (std::size_t i = 0; i < n; ++i) py[i] += alpha * px[i];
}

template <typename T>
void gemv_into(const Matrix<T>& m, std::span<const T> x, std::span<T> out) {
  if (m.cols() != x.size() || m.rows() != out.size()) {
    throw ShapeError("gemv: matrix " + std::to_string(m.rows()) + "x" +
                     std::to_string(m.cols()) + ", vector " +
                     std::to_string(x.size()));
  }
  for (std::size_t i = 0; i < m.rows(); ++i) out[i] = dot(m.row(i), x);
}

template <typename T>
Vector<T> gemv(const Matrix<T>& m, const Vector<T>& x) {
  Vector<T> out(m.rows());
  gemv_into(m, x.values(), out.values());
  return out;
}

// Batched products over row-major operands, used by the recurrent layers.
// Shapes: X is B x k, W is n x k, G is B x n.

// Y += X * W^T
template <typename T>
void matmul_nt_acc(const Matrix<T>& x, const Matrix<T>& w, Matrix<T>& y) {
  if (x.cols() != w.cols() || y.rows() != x.rows() || y.cols() != w.rows()) {
    throw ShapeError("matmul_nt_acc: shape mismatch");
  }
  for (std::size_t b = 0; b < x.rows(); ++b) {
    const auto xb = x.row(b);
    auto yb = y.row(b);
    for (std::size_t o = 0; o < w.rows(); ++o) yb[o] += dot(w.row(o), xb);
  }
}

// D += G * W
template <typename T>
void matmul_nn_acc(const Matrix<T>& g, const Matrix<T>& w, Matrix<T>& d) {
  if (g.cols() != w.rows() || d.rows() != g.rows() || d.cols() != w.cols()) {
    throw ShapeError("matmul_nn_acc: shape mismatch");
  }
  for (std::size_t b = 0; b < g.rows(); ++b) {
    const auto gb = g.row(b);
    auto db = d.row(b);
    for (std::size_t o = 0; o < w.rows(); ++o) {
      if (gb[o] != T{}) axpy(gb[o], w.row(o), db);
    }
  }
}

// D += G^T * X
template <typename T>
void matmul_tn_acc(const Matrix<T>& g, const Matrix<T>& x, Matrix<T>& d) {
  if (g.rows() != x.rows() || d.rows() != g.cols() || d.cols() != x.cols()) {
    throw ShapeError("matmul_tn_acc: shape mismatch");
  }
  for (std::size_t b = 0; b < g.rows(); ++b) {
    const auto gb = g.row(b);
    const auto xb = x.row(b);
    for (std::size_t o = 0; o < d.rows(); ++o) {
      if (gb[o] != T{}) axpy(gb[o], xb, d.row(o));
    }
  }
}

// Adds bias to every row of y.
template <typename T>
void add_row_bias(const Vector<T>& bias, Matrix<T>& y) {
  if (bias.size() != y.cols()) throw ShapeError("add_row_bias: shape mismatch");
  for (std::size_t b = 0; b < y.rows(); ++b) {
    axpy(T{1}, bias.values(), y.row(b));
  }
}

namespace act {

inline constexpr double kReluCeiling = 20.0;

template <typename T>
T clipped_relu(T x) noexcept {
  return std::min(std::max(x, T{0}), static_cast<T>(kReluCeiling));
}

// Slope of clipped_relu at the pre-activation x (0 at and beyond the kinks).
template <typename T>
T clipped_relu_grad(T x) noexcept {
  return (x > T{0} && x < static_cast<T>(kReluCeiling)) ? T{1} : T{0};
}

template <typename T>
T sigmoid(T x) noexcept {
  if (x >= T{0}) {
    const T e = std::exp(-x);
    return T{1} / (T{1} + e);
  }
  const T e = std::exp(x);
  return e / (T{1} + e);
}

}  // namespace act

template <typename T>
Vector<T> clipped_relu(const Vector<T>& x) {
  Vector<T> out(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) out[i] = act::clipped_relu(x[i]);
  return out;
}

template <typename T>
Vector<T> sigmoid(const Vector<T>& x) {
  Vector<T> out(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) out[i] = act::sigmoid(x[i]);
  return out;
}

template <typename T>
Vector<T> tanh(const Vector<T>& x) {
  Vector<T> out(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) out[i] = std::tanh(x[i]);
  return out;
}

// Values uniform in [lo, hi), row-major draw order. Throws ParameterError
// unless lo < hi.
DenseMatrix rand_uniform(Rng& rng, std::size_t rows, std::size_t cols,
                         float lo, float hi);

template <typename T>
bool all_finite(std::span<const T> v) noexcept {
  return std::all_of(v.begin(), v.end(), [](T x) { return std::isfinite(x); });
}

// Converts between scalar types element by element.
template <typename To, typename From>
Matrix<To> cast(const Matrix<From>& m) {
  std::vector<To> data(m.data().begin(), m.data().end());
  return Matrix<To>(m.rows(), m.cols(), std::move(data));
}

template <typename To, typename From>
Vector<To> cast(const Vector<From>& v) {
  return Vector<To>(std::vector<To>(v.data().begin(), v.data().end()));
}

}  // namespace prnn

#endif  // PRNN_TENSOR_HPP_
