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

#include <gtest/gtest.h>

#include <cmath>
#include <limits>
#include <vector>

#include "prnn/errors.hpp"
#include "prnn/rng.hpp"
#include "prnn/tensor.hpp"

namespace prnn {
namespace {

// Naive summation in double, used as the reference for every product.
std::vector<double> naive_gemv(const DenseMatrix& m, const DenseVector& x) {
  std::vector<double> out(m.rows(), 0.0);
  for (std::size_t i = 0; i < m.rows(); ++i) {
    for (std::size_t j = 0; j < m.cols(); ++j) {
      out[i] += static_cast<double>(m(i, j)) * static_cast<double>(x[j]);
    }
  }
  return out;
}

DenseVector random_vector(Rng& rng, std::size_t n) {
  DenseVector v(n);
  for (auto& x : v.values()) x = rng.uniform(-1.0f, 1.0f);
  return v;
}

TEST(Matrix, RejectsMismatchedData) {
  EXPECT_THROW(DenseMatrix(2, 3, std::vector<float>(5)), ShapeError);
}

TEST(Gemv, Identity) {
  const auto y = gemv(DenseMatrix::identity(3), DenseVector{1, 2, 3});
  EXPECT_EQ(y, (DenseVector{1, 2, 3}));
}

TEST(Gemv, ZeroMatrix) {
  EXPECT_EQ(gemv(DenseMatrix(2, 2), DenseVector{5, 7}), (DenseVector{0, 0}));
}

TEST(Gemv, HandSummed) {
  const auto m = DenseMatrix::from_rows({{1, 2}, {3, 4}});
  EXPECT_EQ(gemv(m, DenseVector{1, 1}), (DenseVector{3, 7}));
}

TEST(Gemv, DimensionMismatch) {
  EXPECT_THROW(gemv(DenseMatrix(2, 3), DenseVector{1, 2}), ShapeError);
}

TEST(Gemv, MatchesNaiveOracle) {
  Rng rng(7);
  for (int c = 0; c < 1000; ++c) {
    const std::size_t r = 1 + rng.uniform_index(40);
    const std::size_t k = 1 + rng.uniform_index(40);
    const DenseMatrix m = rand_uniform(rng, r, k, -1.0f, 1.0f);
    const DenseVector x = random_vector(rng, k);
    const DenseVector before = x;
    const auto y = gemv(m, x);
    const auto ref = naive_gemv(m, x);
    ASSERT_EQ(y.size(), r);
    for (std::size_t i = 0; i < r; ++i) {
      ASSERT_NEAR(y[i], ref[i], 1e-5 * std::sqrt(static_cast<double>(k)))
          << "case " << c;
    }
    ASSERT_EQ(x, before);
    ASSERT_EQ(gemv(m, x), y);
  }
}

TEST(Gemv, AbsoluteToleranceOnSmallShapes) {
  Rng rng(8);
  for (int c = 0; c < 1000; ++c) {
    const std::size_t r = 1 + rng.uniform_index(8);
    const std::size_t k = 1 + rng.uniform_index(8);
    const DenseMatrix m = rand_uniform(rng, r, k, -1.0f, 1.0f);
    const DenseVector x = random_vector(rng, k);
    const auto y = gemv(m, x);
    const auto ref = naive_gemv(m, x);
    for (std::size_t i = 0; i < r; ++i) ASSERT_NEAR(y[i], ref[i], 1e-6);
  }
}

TEST(Matmul, VariantsMatchNaive) {
  Rng rng(11);
  for (int c = 0; c < 50; ++c) {
    const std::size_t b = 1 + rng.uniform_index(6);
    const std::size_t in = 1 + rng.uniform_index(12);
    const std::size_t out = 1 + rng.uniform_index(12);
    const DenseMatrix x = rand_uniform(rng, b, in, -1.0f, 1.0f);
    const DenseMatrix w = rand_uniform(rng, out, in, -1.0f, 1.0f);
    const DenseMatrix g = rand_uniform(rng, b, out, -1.0f, 1.0f);

    DenseMatrix y(b, out, 1.0f);
    matmul_nt_acc(x, w, y);
    DenseMatrix d(b, in, 0.5f);
    matmul_nn_acc(g, w, d);
    DenseMatrix dw(out, in, -1.0f);
    matmul_tn_acc(g, x, dw);
    for (std::size_t i = 0; i < b; ++i) {
      for (std::size_t o = 0; o < out; ++o) {
        double ref = 1.0;
        for (std::size_t k = 0; k < in; ++k) ref += double(x(i, k)) * w(o, k);
        ASSERT_NEAR(y(i, o), ref, 1e-5);
      }
      for (std::size_t k = 0; k < in; ++k) {
        double ref = 0.5;
        for (std::size_t o = 0; o < out; ++o) ref += double(g(i, o)) * w(o, k);
        ASSERT_NEAR(d(i, k), ref, 1e-5);
      }
    }
    for (std::size_t o = 0; o < out; ++o) {
      for (std::size_t k = 0; k < in; ++k) {
        double ref = -1.0;
        for (std::size_t i = 0; i < b; ++i) ref += double(g(i, o)) * x(i, k);
        ASSERT_NEAR(dw(o, k), ref, 1e-5);
      }
    }
  }
}

TEST(Matmul, ShapeErrors) {
  DenseMatrix y(2, 3);
  EXPECT_THROW(matmul_nt_acc(DenseMatrix(2, 4), DenseMatrix(3, 5), y),
               ShapeError);
}

TEST(Activations, ClippedRelu) {
  EXPECT_EQ(clipped_relu(DenseVector{-1, 0, 5}), (DenseVector{0, 0, 5}));
  EXPECT_EQ(clipped_relu(DenseVector{25}), (DenseVector{20}));
  EXPECT_EQ(clipped_relu(DenseVector{0}), (DenseVector{0}));
}

TEST(Activations, ClippedReluRange) {
  Rng rng(3);
  DenseVector x(1000);
  for (auto& v : x.values()) v = rng.uniform(-100.0f, 100.0f);
  for (float v : clipped_relu(x).values()) {
    ASSERT_GE(v, 0.0f);
    ASSERT_LE(v, 20.0f);
  }
}

TEST(Activations, SigmoidAndTanh) {
  EXPECT_EQ(sigmoid(DenseVector{0})[0], 0.5f);
  EXPECT_EQ(tanh(DenseVector{0})[0], 0.0f);
  EXPECT_NEAR(sigmoid(DenseVector{40})[0], 1.0f, 1e-7);
  EXPECT_NEAR(sigmoid(DenseVector{-40})[0], 0.0f, 1e-7);
  Rng rng(5);
  for (int i = 0; i < 1000; ++i) {
    const float x = rng.uniform(-10.0f, 10.0f);
    const float s = sigmoid(DenseVector{x})[0];
    const float t = tanh(DenseVector{x})[0];
    ASSERT_GE(s, 0.0f);
    ASSERT_LE(s, 1.0f);
    ASSERT_GE(t, -1.0f);
    ASSERT_LE(t, 1.0f);
    ASSERT_NEAR(s, 1.0 / (1.0 + std::exp(-double(x))), 1e-6);
  }
}

TEST(Rng, SplitMixReferenceValues) {
  // First outputs of SplitMix64 seeded with 0, as published with the
  // reference implementation.
  Rng rng(0);
  EXPECT_EQ(rng.next_u64(), 0xE220A8397B1DCDAFULL);
  EXPECT_EQ(rng.next_u64(), 0x6E789E6AA1B965F4ULL);
  EXPECT_EQ(rng.next_u64(), 0x06C45D188009454FULL);
}

TEST(Rng, UniformIndexInRange) {
  Rng rng(9);
  std::vector<int> counts(7, 0);
  for (int i = 0; i < 7000; ++i) ++counts[rng.uniform_index(7)];
  for (int c : counts) {
    EXPECT_GT(c, 800);
    EXPECT_LT(c, 1200);
  }
}

TEST(Rng, UniformStaysBelowHi) {
  Rng rng(10);
  for (int i = 0; i < 10000; ++i) {
    const float v = rng.uniform(1.0f, std::nextafter(1.0f, 2.0f));
    ASSERT_EQ(v, 1.0f);
  }
}

TEST(RandUniform, Deterministic) {
  Rng a(42), b(42);
  EXPECT_EQ(rand_uniform(a, 2, 2, 0.0f, 1.0f), rand_uniform(b, 2, 2, 0.0f, 1.0f));
}

TEST(RandUniform, Range) {
  Rng rng(1);
  const auto m = rand_uniform(rng, 50, 50, 0.0f, 1.0f);
  for (float v : m.values()) {
    ASSERT_GE(v, 0.0f);
    ASSERT_LT(v, 1.0f);
  }
}

TEST(RandUniform, SeedsDiffer) {
  Rng a(42), b(43);
  const auto ma = rand_uniform(a, 2, 2, 0.0f, 1.0f);
  const auto mb = rand_uniform(b, 2, 2, 0.0f, 1.0f);
  int same = 0;
  for (std::size_t i = 0; i < 4; ++i) same += ma.values()[i] == mb.values()[i];
  EXPECT_EQ(same, 0);
}

TEST(RandUniform, RejectsEmptyRange) {
  Rng rng(1);
  EXPECT_THROW(rand_uniform(rng, 1, 1, 1.0f, 1.0f), ParameterError);
  EXPECT_THROW(rand_uniform(rng, 1, 1, 2.0f, 1.0f), ParameterError);
}

TEST(Tensor, AllFinite) {
  const std::vector<float> ok{1, 2}, bad{1, std::numeric_limits<float>::quiet_NaN()};
  EXPECT_TRUE(all_finite<float>(ok));
  EXPECT_FALSE(all_finite<float>(bad));
}

}  // namespace
}  // namespace prnn
