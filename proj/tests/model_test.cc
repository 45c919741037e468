// rnnt-lab/tests/model_test.cc

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
#include <filesystem>
#include <functional>
#include <memory>
#include <fstream>
#include <sstream>
#include <vector>

#include <gtest/gtest.h>

#include "rnnt/checkpoint.h"
#include "rnnt/loss.h"
#include "rnnt/model.h"
#include "test_util.h"

namespace rnnt {
namespace {

ModelConfig tiny_config(bool layer_norm = false) {
  ModelConfig c;
  c.input_dim = 2;
  c.stack_factor = 1;
  c.stride = 1;
  c.encoder_layers = 2;
  c.prediction_layers = 1;
  c.hidden = 3;
  c.projection = 3;
  c.vocab_size = 3;
  c.use_layer_norm = layer_norm;
  return c;
}

Tensor encode_value(RnntModel &m, const Tensor &x) {
  Tape tape;
  return m.encode(tape, x).value();
}

Tensor predict_value(RnntModel &m, const std::vector<int> &y) {
  Tape tape;
  return m.predict(tape, y).value();
}

TEST(StackFramesTest, IdentityWithUnitStack) {
  Rng rng(1);
  Tensor f = testing::random_tensor({5, 3}, rng);
  EXPECT_EQ(stack_frames(f, 1, 1), f);
}

TEST(StackFramesTest, EightByThree) {
  Tensor f({8, 2});
  for (std::size_t i = 0; i < f.size(); ++i) f[i] = static_cast<double>(i);
  Tensor s = stack_frames(f, 8, 3);
  ASSERT_EQ(s.shape(), (Shape{3, 16}));
  for (std::size_t j = 0; j < 16; ++j) EXPECT_EQ(s.at(0, j), static_cast<double>(j));
  // Frame 1 starts at raw row 3; rows 3..7 exist, the rest is padding.
  for (std::size_t j = 0; j < 10; ++j) EXPECT_EQ(s.at(1, j), static_cast<double>(6 + j));
  for (std::size_t j = 10; j < 16; ++j) EXPECT_EQ(s.at(1, j), 0.0);
}

TEST(StackFramesTest, TailIsZeroPadded) {
  Tensor f({7, 1}, 1.0);
  Tensor s = stack_frames(f, 8, 3);
  ASSERT_EQ(s.shape(), (Shape{3, 8}));
  // Frame 2 covers raw rows 6..13: only row 6 exists.
  EXPECT_EQ(s.at(2, 0), 1.0);
  for (std::size_t j = 1; j < 8; ++j) EXPECT_EQ(s.at(2, j), 0.0);
  EXPECT_EQ(s.at(0, 6), 1.0);
  EXPECT_EQ(s.at(0, 7), 0.0);
}

TEST(StackFramesTest, RejectsBadArguments) {
  Tensor f({2, 2});
  EXPECT_THROW(stack_frames(f, 0, 1), InvalidArgument);
  EXPECT_THROW(stack_frames(f, 1, 0), InvalidArgument);
  EXPECT_THROW(Tensor({0, 2}), InvalidArgument);  // N = 0 cannot be built
}

TEST(EncoderTest, ZeroWeightsGiveZeroOutput) {
  RnntModel m(tiny_config());
  Rng rng(2);
  Tensor x = testing::random_tensor({4, 2}, rng);
  Tensor h = encode_value(m, x);
  ASSERT_EQ(h.shape(), (Shape{4, 3}));
  for (double v : h.data()) EXPECT_EQ(v, 0.0);
}

TEST(EncoderTest, RejectsWrongWidth) {
  RnntModel m(tiny_config());
  EXPECT_THROW(encode_value(m, Tensor({4, 3})), InvalidArgument);
}

TEST(EncoderTest, IsCausal) {
  for (bool ln : {false, true}) {
    RnntModel m(tiny_config(ln));
    m.init(3);
    Rng rng(4);
    Tensor x = testing::random_tensor({6, 2}, rng);
    Tensor a = encode_value(m, x);
    for (std::size_t t = 0; t < 6; ++t) {
      Tensor x2 = x;
      x2.at(t, 0) += 0.5;
      Tensor b = encode_value(m, x2);
      for (std::size_t s = 0; s < t; ++s)
        for (std::size_t j = 0; j < 3; ++j) EXPECT_EQ(a.at(s, j), b.at(s, j));
      bool changed = false;
      for (std::size_t j = 0; j < 3; ++j) changed |= a.at(t, j) != b.at(t, j);
      EXPECT_TRUE(changed);
    }
  }
}

TEST(PredictionTest, EmptyPrefixGivesStartRowOnly) {
  RnntModel m(tiny_config());
  m.init(5);
  EXPECT_EQ(predict_value(m, {}).shape(), (Shape{1, 3}));
}

TEST(PredictionTest, RowsDependOnPrefix) {
  RnntModel m(tiny_config());
  m.init(5);
  Tensor p = predict_value(m, {0});
  bool differs = false;
  for (std::size_t j = 0; j < 3; ++j) differs |= p.at(0, j) != p.at(1, j);
  EXPECT_TRUE(differs);
}

TEST(PredictionTest, IsCausal) {
  RnntModel m(tiny_config());
  m.init(6);
  Tensor a = predict_value(m, {0, 1, 2, 1});
  Tensor b = predict_value(m, {0, 1, 0, 1});
  for (std::size_t u = 0; u <= 2; ++u)
    for (std::size_t j = 0; j < 3; ++j) EXPECT_EQ(a.at(u, j), b.at(u, j));
}

TEST(PredictionTest, RejectsOutOfRangeIds) {
  RnntModel m(tiny_config());
  EXPECT_THROW(predict_value(m, {3}), InvalidArgument);
  EXPECT_THROW(predict_value(m, {-1}), InvalidArgument);
}

TEST(PredictionTest, StreamingStepsMatchBatchRows) {
  RnntModel m(tiny_config(true));
  m.init(7);
  std::vector<int> y = {2, 0, 1};
  Tensor rows = predict_value(m, y);
  auto state = m.prediction.start();
  for (std::size_t u = 0; u <= y.size(); ++u) {
    for (std::size_t j = 0; j < 3; ++j) EXPECT_EQ(state.output[j], rows.at(u, j));
    if (u < y.size()) state = m.prediction.extend(state, y[u]);
  }
}

TEST(JointTest, MinimalLattice) {
  RnntModel m(tiny_config());
  m.init(8);
  Tape tape;
  Var e = tape.constant(Tensor({1, 3}, 0.1));
  Var p = tape.constant(Tensor({1, 3}, 0.2));
  EXPECT_EQ(m.joint(tape, e, p).shape(), (Shape{1, 1, 4}));
}

TEST(JointTest, ZeroWeightsGiveUniformPosterior) {
  RnntModel m(tiny_config());
  Rng rng(9);
  Tape tape;
  Var z = m.joint(tape, tape.constant(testing::random_tensor({3, 3}, rng)),
                  tape.constant(testing::random_tensor({2, 3}, rng)));
  Tensor lp = log_softmax(z.value());
  for (double v : lp.data()) EXPECT_NEAR(v, -std::log(4.0), 1e-15);
}

TEST(JointTest, LatticeEqualsPointwiseRecomputation) {
  RnntModel m(tiny_config());
  m.init(10);
  Rng rng(11);
  Tensor he = testing::random_tensor({4, 3}, rng);
  Tensor hp = testing::random_tensor({3, 3}, rng);
  Tape tape;
  Tensor lattice = log_softmax(m.joint(tape, tape.constant(he), tape.constant(hp)).value());
  const JointNetwork &j = m.joint_net;
  for (int trial = 0; trial < 10; ++trial) {
    std::size_t t = testing::random_int(rng, 0, 3), u = testing::random_int(rng, 0, 2);
    // Pointwise oracle written out directly from the definition.
    std::vector<double> inner(3), z(4);
    for (std::size_t c = 0; c < 3; ++c) {
      inner[c] = j.bias[c];
      for (std::size_t i = 0; i < 3; ++i)
        inner[c] += j.enc_weight.at(i, c) * he.at(t, i) + j.pred_weight.at(i, c) * hp.at(u, i);
    }
    for (std::size_t k = 0; k < 4; ++k) {
      z[k] = j.out_bias[k];
      for (std::size_t c = 0; c < 3; ++c) z[k] += j.out_weight.at(c, k) * inner[c];
    }
    double lse = logsumexp(z);
    for (std::size_t k = 0; k < 4; ++k) EXPECT_NEAR(lattice.at(t, u, k), z[k] - lse, 1e-12);

    std::vector<double> streamed(4);
    j.log_probs(j.project_encoder(he.row(t)), j.project_prediction(hp.row(u)), streamed);
    for (std::size_t k = 0; k < 4; ++k) EXPECT_NEAR(streamed[k], z[k] - lse, 1e-12);
  }
}

TEST(JointTest, WidthMismatchRejected) {
  RnntModel m(tiny_config());
  Tape tape;
  EXPECT_THROW(m.joint(tape, tape.constant(Tensor({2, 4})), tape.constant(Tensor({1, 3}))),
               InvalidArgument);
}

// Finite-difference checks of every loss through the full model.
constexpr double kModelEps = 1e-5;

class ModelGradientTest : public ::testing::TestWithParam<bool> {
 protected:
  void SetUp() override {
    model = std::make_unique<RnntModel>(tiny_config(GetParam()));
    Rng rng(13);
    // Every parameter, biases and gains included, uniform in [-1, 1].
    for (Tensor *t : model->parameters())
      for (double &v : t->data()) v = testing::uniform(rng, -1.0, 1.0);
    x = testing::random_tensor({3, 2}, rng);
    head.init(rng);
  }

  double check(const std::function<Var(Tape &)> &loss, std::vector<Tensor *> params) {
    return grad_check(
        [&]() {
          Tape tape;
          Var l = loss(tape);
          tape.backward(l);
          return l.value()[0];
        },
        params, kModelEps);
  }

  std::unique_ptr<RnntModel> model;
  Tensor x;
  LinearHead head{3, 4};
  std::vector<int> y = {1, 0};
};

TEST_P(ModelGradientTest, RnntLoss) {
  double err = check(
      [&](Tape &tape) { return rnnt_loss(model->logits(tape, x, y), y, 3); },
      model->parameters());
  EXPECT_LT(err, 1e-4);
}

TEST_P(ModelGradientTest, MaskedCe3d) {
  LabelTensor label(3, 3, 4);
  label.set(0, 0, 1);
  label.set(0, 1, 3);
  label.set(1, 1, 0);
  label.set(2, 2, 3);
  double err = check(
      [&](Tape &tape) { return masked_ce_3d(model->logits(tape, x, y), label); },
      model->parameters());
  EXPECT_LT(err, 1e-4);
}

TEST_P(ModelGradientTest, FrameCeThroughEncoder) {
  std::vector<int> frames = {1, 1, 0};
  auto params = model->parameters("encoder.");
  params.push_back(&head.weight);
  params.push_back(&head.bias);
  double err = check(
      [&](Tape &tape) { return frame_ce_loss(head.forward(tape, model->encode(tape, x)), frames); },
      params);
  EXPECT_LT(err, 1e-4);
}

TEST_P(ModelGradientTest, CtcThroughEncoder) {
  auto params = model->parameters("encoder.");
  params.push_back(&head.weight);
  params.push_back(&head.bias);
  double err = check(
      [&](Tape &tape) { return ctc_loss(head.forward(tape, model->encode(tape, x)), y, 3); },
      params);
  EXPECT_LT(err, 1e-4);
}

TEST_P(ModelGradientTest, LmCeThroughPrediction) {
  std::vector<int> seq = {2, 0, 1};
  auto params = model->parameters("prediction.");
  params.push_back(&head.weight);
  params.push_back(&head.bias);
  double err = check(
      [&](Tape &tape) { return lm_ce_loss(head.forward(tape, model->predict(tape, seq)), seq); },
      params);
  EXPECT_LT(err, 1e-4);
}

TEST(GradCheckTest, LstmCellLoss) {
  Rng rng(21);
  LstmLayer layer(3, 4, false);
  layer.init(rng);
  for (double &b : layer.bias.data()) b = testing::uniform(rng, -1, 1);
  Tensor x = testing::random_tensor({1, 3}, rng);
  Tensor w = testing::random_tensor({1, 4}, rng);
  Tensor *params[] = {&layer.w_input, &layer.w_recurrent, &layer.bias, &x};
  double err = grad_check(
      [&]() {
        Tape tape;
        Var h = lstm_layer(tape, tape.param(x), layer);
        Var l = sum(mul(h, tape.constant(w)));
        tape.backward(l);
        return l.value()[0];
      },
      params, 1e-5);
  EXPECT_LT(err, 1e-4);
}

TEST(GradCheckTest, RnntLossWrtJointWeights) {
  RnntModel m(tiny_config());
  m.init(22);
  Rng rng(23);
  Tensor x = testing::random_tensor({3, 2}, rng);
  std::vector<int> y = {2, 1};
  auto params = m.parameters("joint.");
  double err = grad_check(
      [&]() {
        Tape tape;
        Var l = rnnt_loss(m.logits(tape, x, y), y, 3);
        tape.backward(l);
        return l.value()[0];
      },
      params, 1e-5);
  EXPECT_LT(err, 1e-4);
}

INSTANTIATE_TEST_SUITE_P(LayerNorm, ModelGradientTest, ::testing::Values(false, true));

TEST(CheckpointTest, RoundTripIsByteExact) {
  RnntModel m(tiny_config(true));
  m.init(14);
  Checkpoint ckpt = snapshot(m);
  auto dir = std::filesystem::temp_directory_path() / "rnnt_ckpt_test";
  std::filesystem::create_directories(dir);
  save_checkpoint(ckpt, dir / "a.json");
  Checkpoint back = load_checkpoint(dir / "a.json");
  save_checkpoint(back, dir / "b.json");
  auto slurp = [](const std::filesystem::path &p) {
    std::ifstream is(p);
    std::stringstream ss;
    ss << is.rdbuf();
    return ss.str();
  };
  EXPECT_EQ(slurp(dir / "a.json"), slurp(dir / "b.json"));
  EXPECT_EQ(back.tensors, ckpt.tensors);

  RnntModel other(tiny_config(true));
  EXPECT_EQ(restore(other, back), m.named_parameters().size());
  EXPECT_EQ(snapshot(other).tensors, ckpt.tensors);
  std::filesystem::remove_all(dir);
}

TEST(CheckpointTest, PrefixRestoreTouchesOnlyThatComponent) {
  RnntModel a(tiny_config()), b(tiny_config());
  a.init(15);
  b.init(16);
  Checkpoint before = snapshot(b);
  restore(b, snapshot(a), "encoder.");
  Checkpoint after = snapshot(b);
  Checkpoint src = snapshot(a);
  for (const auto &[name, t] : after.tensors) {
    if (name.starts_with("encoder."))
      EXPECT_EQ(t, src.tensors.at(name)) << name;
    else
      EXPECT_EQ(t, before.tensors.at(name)) << name;
  }
}

TEST(CheckpointTest, ShapeMismatchRejected) {
  RnntModel a(tiny_config());
  ModelConfig bigger = tiny_config();
  bigger.hidden = 4;
  RnntModel b(bigger);
  EXPECT_THROW(restore(b, snapshot(a)), InvalidArgument);
}

TEST(ModelTest, InitIsDeterministic) {
  RnntModel a(tiny_config()), b(tiny_config());
  a.init(99);
  b.init(99);
  EXPECT_EQ(snapshot(a).tensors, snapshot(b).tensors);
}

}  // namespace
}  // namespace rnnt
