// rnnt-lab/tests/autograd_test.cc

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
#include <functional>
#include <vector>

#include <gtest/gtest.h>

#include "rnnt/autograd.h"
#include "test_util.h"

namespace rnnt {
namespace {

using OpFn = std::function<Var(Tape &, std::vector<Var> &)>;

// Contracts the op's output with fixed random weights so every output
// coordinate contributes, then runs the finite-difference check over all
// inputs.
double check_primitive(const OpFn &op, std::vector<Shape> shapes, std::uint64_t seed) {
  Rng rng(seed);
  std::vector<Tensor> inputs;
  for (auto &s : shapes) inputs.push_back(testing::random_tensor(s, rng));
  Tensor weights;
  std::vector<Tensor *> params;
  for (Tensor &t : inputs) params.push_back(&t);
  auto loss = [&]() {
    Tape tape;
    std::vector<Var> vars;
    for (Tensor &t : inputs) vars.push_back(tape.param(t));
    Var out = op(tape, vars);
    if (weights.empty()) {
      Rng wrng(seed + 1);
      weights = testing::random_tensor(out.shape(), wrng);
    }
    Var l = sum(mul(out, tape.constant(weights)));
    tape.backward(l);
    return l.value()[0];
  };
  return grad_check(loss, params, 1e-5);
}

TEST(MatmulTest, IdentityCase) {
  Tape tape;
  Var a = tape.constant(Tensor::matrix({{1, 0}, {0, 1}}));
  Var b = tape.constant(Tensor::matrix({{3}, {4}}));
  EXPECT_EQ(matmul(a, b).value(), Tensor::matrix({{3}, {4}}));
}

TEST(MatmulTest, RowTimesColumn) {
  Tape tape;
  Var a = tape.constant(Tensor::matrix({{1, 2}}));
  Var b = tape.constant(Tensor::matrix({{3}, {4}}));
  EXPECT_EQ(matmul(a, b).value(), Tensor::matrix({{11}}));
}

TEST(MatmulTest, ShapeMismatchReportsBothShapes) {
  Tape tape;
  Var a = tape.constant(Tensor({2, 3}));
  Var b = tape.constant(Tensor({2, 3}));
  try {
    matmul(a, b);
    FAIL() << "expected rejection";
  } catch (const InvalidArgument &e) {
    std::string msg = e.what();
    EXPECT_NE(msg.find("[2x3]"), std::string::npos);
    EXPECT_NE(msg.find("and [2x3]"), std::string::npos);
  }
}

TEST(MatmulTest, GradientMatchesFiniteDifferences) {
  double err = check_primitive([](Tape &, std::vector<Var> &v) { return matmul(v[0], v[1]); },
                               {{3, 4}, {4, 2}}, 11);
  EXPECT_LT(err, 1e-6);
}

TEST(PrimitiveGradTest, AllPrimitives) {
  struct Case {
    const char *name;
    OpFn op;
    std::vector<Shape> shapes;
  };
  std::vector<Case> cases = {
      {"add", [](Tape &, auto &v) { return add(v[0], v[1]); }, {{2, 3}, {2, 3}}},
      {"mul", [](Tape &, auto &v) { return mul(v[0], v[1]); }, {{2, 3}, {2, 3}}},
      {"scale", [](Tape &, auto &v) { return scale(v[0], -1.7); }, {{4}}},
      {"sigmoid", [](Tape &, auto &v) { return sigmoid(v[0]); }, {{3, 3}}},
      {"tanh", [](Tape &, auto &v) { return tanh(v[0]); }, {{3, 3}}},
      {"add_row_bias", [](Tape &, auto &v) { return add_row_bias(v[0], v[1]); },
       {{3, 4}, {4}}},
      {"gather_rows",
       [](Tape &, auto &v) {
         std::vector<int> ids = {2, -1, 0, 2};
         return gather_rows(v[0], ids);
       },
       {{3, 5}}},
      {"pairwise_add", [](Tape &, auto &v) { return pairwise_add(v[0], v[1]); },
       {{3, 4}, {2, 4}}},
      {"concat_rows",
       [](Tape &, auto &v) {
         std::vector<Var> parts = {v[0], v[1]};
         return concat_rows(parts);
       },
       {{1, 3}, {2, 3}}},
      {"reshape", [](Tape &, auto &v) { return reshape(v[0], {3, 2}); }, {{2, 3}}},
      {"log_softmax", [](Tape &, auto &v) { return log_softmax(v[0]); }, {{2, 3, 4}}},
      {"sum", [](Tape &, auto &v) { return sum(v[0]); }, {{5}}},
  };
  std::uint64_t seed = 100;
  for (const Case &c : cases) {
    double err = check_primitive(c.op, c.shapes, seed++);
    EXPECT_LT(err, 1e-4) << c.name;
  }
}

TEST(TapeTest, SharedParameterGradientsAccumulate) {
  Tensor w = Tensor::matrix({{2.0}});
  Tape tape;
  Var a = tape.param(w);
  Var b = tape.param(w);
  // f = w * w with two separate bindings -> df/dw = 2w.
  Var f = sum(mul(a, b));
  w.zero_grad();
  tape.backward(f);
  EXPECT_DOUBLE_EQ(w.grad()[0], 4.0);
}

TEST(TapeTest, BackwardIsDeterministic) {
  Rng rng(3);
  Tensor a = testing::random_tensor({3, 4}, rng);
  Tensor b = testing::random_tensor({4, 2}, rng);
  auto run = [&]() {
    a.zero_grad();
    b.zero_grad();
    Tape tape;
    Var out = sum(tanh(matmul(tape.param(a), tape.param(b))));
    tape.backward(out);
    return std::vector<double>(a.grad().begin(), a.grad().end());
  };
  EXPECT_EQ(run(), run());
}

TEST(TapeTest, BackwardNeedsScalar) {
  Tape tape;
  Var x = tape.constant(Tensor({2}));
  EXPECT_THROW(tape.backward(x), InvalidArgument);
}

TEST(TapeTest, NodesAreTopologicallyOrdered) {
  Tensor w({2, 2}, 0.5);
  Tape tape;
  Var a = tape.param(w);
  Var b = tanh(a);
  Var c = add(a, b);
  EXPECT_LT(a.id, b.id);
  EXPECT_LT(b.id, c.id);
  EXPECT_EQ(tape.size(), 3u);
}

TEST(GradCheckTest, Square) {
  Tensor x = Tensor::vector({3.0});
  Tensor *params[] = {&x};
  auto f = [&]() {
    Tape tape;
    Var v = tape.param(x);
    Var y = sum(mul(v, v));
    tape.backward(y);
    return y.value()[0];
  };
  EXPECT_LT(grad_check(f, params, 1e-5), 1e-8);
  x.zero_grad();
  f();
  EXPECT_DOUBLE_EQ(x.grad()[0], 6.0);
}

TEST(GradCheckTest, RejectsNonFinite) {
  Tensor x = Tensor::vector({1.0});
  Tensor *params[] = {&x};
  EXPECT_THROW(grad_check([]() { return NAN; }, params, 1e-5), InvalidArgument);
}

}  // namespace
}  // namespace rnnt
