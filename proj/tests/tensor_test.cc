// rnnt-lab/tests/tensor_test.cc

// Copyright 2026  rnnt-lab authors

// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//  http://www.apache.org/licenses/LICENSE-2.0
//
// THIS CODE IS PROVIDED *AS IS* BASIS, WITHOUT WARRANTIES OR CONDITIONS OF ANY
// KIND, EITHER EXPRESS OR IMPLIED, INCLUDING WITHOUT LIMITATION ANY IMPLIED
// WARRANTIES OR CONDITIONS OF TITLE, FITNESS FOR A PARTICULAR PURPOSE,
// MERCHANTABLITY OR NON-INFRINGEMENT.
// See the Apache 2 License for the specific language governing permissions and
// limitations under the License.

#include <cmath>
#include <limits>

#include <gtest/gtest.h>

#include "rnnt/tensor.h"
#include "test_util.h"

namespace rnnt {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

TEST(TensorTest, ShapeAndData) {
  Tensor t({2, 3}, 1.5);
  EXPECT_EQ(t.size(), 6u);
  EXPECT_EQ(t.at(1, 2), 1.5);
  EXPECT_THROW(Tensor({2, 2}, std::vector<double>(3)), InvalidArgument);
  EXPECT_THROW(Tensor({0, 2}), InvalidArgument);
  EXPECT_THROW(t.reshaped({4}), InvalidArgument);
  EXPECT_EQ(t.reshaped({3, 2}).dim(0), 3u);
}

TEST(TensorTest, GradSlotMatchesShape) {
  Tensor t({3, 2});
  EXPECT_FALSE(t.has_grad());
  EXPECT_EQ(t.grad().size(), t.size());
  EXPECT_TRUE(t.has_grad());
}

TEST(LogSumExpTest, Examples) {
  const double a = 0.37;
  EXPECT_DOUBLE_EQ(logsumexp(std::vector<double>{a}), a);
  EXPECT_NEAR(logsumexp(std::vector<double>{std::log(1.0), std::log(1.0)}),
              std::log(2.0), 1e-15);
  EXPECT_EQ(logsumexp(std::vector<double>{-kInf, 0.0}), 0.0);
  EXPECT_EQ(logsumexp(std::vector<double>{-kInf, -kInf}), -kInf);
  EXPECT_THROW(logsumexp(std::vector<double>{}), InvalidArgument);
}

TEST(LogSoftmaxTest, UniformCase) {
  Tensor y = log_softmax(Tensor::vector({0.0, 0.0}));
  EXPECT_NEAR(y[0], -std::log(2.0), 1e-15);
  EXPECT_NEAR(y[1], -std::log(2.0), 1e-15);
}

TEST(LogSoftmaxTest, LargeLogitsDoNotOverflow) {
  Tensor y = log_softmax(Tensor::vector({1000.0, 0.0}));
  EXPECT_NEAR(y[0], 0.0, 1e-12);
  EXPECT_NEAR(y[1], -1000.0, 1e-9);
  EXPECT_TRUE(std::isfinite(y[1]));
}

TEST(LogSoftmaxTest, RejectsNonFinite) {
  EXPECT_THROW(log_softmax(Tensor::vector({0.0, NAN})), InvalidArgument);
  EXPECT_THROW(log_softmax(Tensor::vector({kInf, 0.0})), InvalidArgument);
}

TEST(LogSoftmaxTest, RandomSlicesNormalize) {
  Rng rng(7);
  for (int trial = 0; trial < 50; ++trial) {
    Tensor x = testing::random_tensor({3, 4, 5}, rng, -5.0, 5.0);
    Tensor y = log_softmax(x);
    for (std::size_t off = 0; off < y.size(); off += 5) {
      double direct = 0.0;
      for (std::size_t k = 0; k < 5; ++k) direct += std::exp(y[off + k]);
      EXPECT_NEAR(direct, 1.0, 1e-12);
      EXPECT_LT(std::abs(logsumexp(y.data().subspan(off, 5))), 1e-10);
    }
  }
}

}  // namespace
}  // namespace rnnt
