// rnnt-lab/tests/pretrain_test.cc

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

#include <gtest/gtest.h>

#include "rnnt/decoding.h"
#include "rnnt/loss.h"
#include "rnnt/pretrain.h"

namespace rnnt {
namespace {

constexpr int S = kSpaceId;
constexpr int A = 1, B = 2, C = 3;
constexpr int kBlank = 4;  // four tokens {s, A, B, C}, blank last

// 'A A A B B s C C' and its transcript 'A B s C'.
const FrameAlignment kFig3{{A, A, A, B, B, S, C, C}};
const std::vector<int> kFig3Tokens = {A, B, S, C};

ModelConfig tiny_config() {
  ModelConfig c;
  c.input_dim = 8;
  c.stack_factor = 4;
  c.stride = 2;
  c.encoder_layers = 1;
  c.prediction_layers = 1;
  c.hidden = 16;
  c.projection = 16;
  c.vocab_size = 8;
  return c;
}

Corpus small_corpus(std::size_t n, std::uint64_t seed = 3) {
  CorpusConfig cc;
  cc.train_utterances = n;
  cc.test_utterances = 0;
  cc.max_words = 2;
  cc.max_pieces = 2;
  cc.noise = 0.1;
  cc.seed = seed;
  return gen_corpus(cc).train;
}

bool same_tensors(const Checkpoint &a, const Checkpoint &b, const std::string &prefix) {
  for (const auto &[name, t] : a.tensors)
    if (name.starts_with(prefix) && !(t == b.tensors.at(name))) return false;
  return true;
}

TEST(LabelY1Test, Fig3EveryRowIsTheAlignment) {
  LabelTensor y = build_y1(kFig3, kFig3Tokens, kBlank);
  ASSERT_EQ(y.rows(), 5u);
  for (std::size_t t = 0; t < 8; ++t) {
    for (std::size_t u = 0; u < 4; ++u) EXPECT_EQ(y.target(t, u), kFig3.labels[t]);
    EXPECT_EQ(y.target(t, 4), kBlank);
  }
  EXPECT_EQ(y.mask_count(), 8u * 5u);
}

TEST(LabelY1Test, EmptyTranscriptIsOneBlankRow) {
  LabelTensor y = build_y1(FrameAlignment{{S, S, S}}, {}, kBlank);
  ASSERT_EQ(y.rows(), 1u);
  for (std::size_t t = 0; t < 3; ++t) EXPECT_EQ(y.target(t, 0), kBlank);
}

TEST(LabelY2Test, Fig3DecodesToPrintedString) {
  LabelTensor y = build_y2(kFig3, kFig3Tokens, kBlank);
  LabelTensorScorer scorer(y);
  const int F = kBlank;
  EXPECT_EQ(greedy_symbols(scorer),
            (std::vector<int>{A, F, F, F, B, F, F, S, F, C, F, F}));
  Hypothesis h = greedy_decode(scorer);
  EXPECT_EQ(h.prefix, kFig3Tokens);
  EXPECT_EQ(h.emit_frames, (std::vector<std::size_t>{0, 3, 5, 6}));
  EXPECT_EQ(h.log_prob, 0.0);
}

TEST(LabelY2Test, MaskIsTwoCellsPerFrameHalfBlank) {
  LabelTensor y = build_y2(kFig3, kFig3Tokens, kBlank);
  EXPECT_EQ(y.mask_count(), 16u);
  std::size_t blanks = 0;
  for (std::size_t t = 0; t < 8; ++t)
    for (std::size_t u = 0; u < 5; ++u) blanks += y.target(t, u) == kBlank;
  EXPECT_EQ(blanks, 8u);
}

TEST(LabelY2Test, SingleFrameSingleToken) {
  LabelTensor y = build_y2(FrameAlignment{{A}}, std::vector<int>{A}, kBlank);
  EXPECT_EQ(y.target(0, 0), A);
  EXPECT_EQ(y.target(0, 1), kBlank);
  EXPECT_EQ(y.mask_count(), 2u);
}

TEST(LabelY2Test, RejectsTranscriptMismatch) {
  std::vector<int> wrong = {A, B, C};
  EXPECT_THROW(build_y2(kFig3, wrong, kBlank), InvalidArgument);
  EXPECT_THROW(build_y3(kFig3, wrong, kBlank, S), InvalidArgument);
  EXPECT_THROW(build_y1(kFig3, wrong, kBlank), InvalidArgument);
}

TEST(LabelY3Test, Fig3ShortSpaceBecomesBlank) {
  LabelTensor y = build_y3(kFig3, kFig3Tokens, kBlank, S);
  EXPECT_EQ(y.mask_count(), 8u);
  EXPECT_EQ(y.target(5, 2), kBlank);
  EXPECT_EQ(y.target(0, 0), A);
  EXPECT_EQ(y.target(4, 1), B);
  EXPECT_EQ(y.target(7, 3), C);
}

TEST(LabelY3Test, WithoutShortPausesItIsTheTokenHalfOfY2) {
  FrameAlignment fa{{A, A, S, S, S, B}};
  std::vector<int> tokens = {A, S, B};
  LabelTensor y2 = build_y2(fa, tokens, kBlank);
  LabelTensor y3 = build_y3(fa, tokens, kBlank, S);
  for (std::size_t t = 0; t < fa.size(); ++t)
    for (std::size_t u = 0; u < 4; ++u) {
      int expect = y2.target(t, u) == kBlank ? -1 : y2.target(t, u);
      EXPECT_EQ(y3.target(t, u), expect);
    }
}

TEST(LabelY3Test, TwoFramePauseIsBlankOnBothFrames) {
  FrameAlignment fa{{A, S, S, B}};
  LabelTensor y = build_y3(fa, std::vector<int>{A, S, B}, kBlank, S);
  EXPECT_EQ(y.target(1, 1), kBlank);
  EXPECT_EQ(y.target(2, 1), kBlank);
  EXPECT_EQ(y.target(3, 2), B);
}

TEST(LabelTensorTest, GeneratedCorpusProperties) {
  ModelConfig cfg = tiny_config();
  for (const Utterance &u : small_corpus(40, 11)) {
    FrameAlignment fa = utterance_alignment(u, cfg.stride);
    const std::size_t T = fa.size(), U = u.transcript.size();
    LabelTensor y1 = build_y1(fa, u.transcript, cfg.blank());
    LabelTensor y2 = build_y2(fa, u.transcript, cfg.blank());
    LabelTensor y3 = build_y3(fa, u.transcript, cfg.blank(), kSpaceId);
    EXPECT_EQ(y1.mask_count(), T * (U + 1));
    EXPECT_EQ(y2.mask_count(), 2 * T);
    EXPECT_EQ(y3.mask_count(), T);
    LabelTensorScorer scorer(y2);
    std::vector<int> symbols = greedy_symbols(scorer);
    EXPECT_EQ(symbols.size(), T + U) << u.id;
    Hypothesis h = greedy_decode(scorer);
    EXPECT_EQ(h.prefix, u.transcript) << u.id;
    // Oracle emissions land on word starts: zero delay everywhere.
    DelayStats d = measure_delay(h, u.words, u.transcript);
    ASSERT_EQ(d.skipped, 0u);
    for (long s : d.samples) EXPECT_EQ(s, 0);
  }
}

TEST(VariantTest, NamesRoundTrip) {
  for (WholeVariant v : {WholeVariant::kY1, WholeVariant::kY2, WholeVariant::kY3})
    EXPECT_EQ(parse_whole_variant(variant_name(v)), v);
  EXPECT_THROW(parse_whole_variant("y4"), InvalidArgument);
}

TEST(PretrainTest, ZeroEpochsLeaveTheModelUntouched) {
  Corpus corpus = small_corpus(3);
  TrainOptions opts;
  opts.epochs = 0;
  RnntModel model(tiny_config());
  model.init(5);
  Checkpoint init = snapshot(model);
  EXPECT_TRUE(same_tensors(pretrain_encoder_ce(model, corpus, opts).checkpoint, init, ""));
  EXPECT_TRUE(same_tensors(pretrain_encoder_ctc(model, corpus, opts).checkpoint, init, ""));
  EXPECT_TRUE(same_tensors(pretrain_prediction_lm(model, corpus, opts).checkpoint, init, ""));
  EXPECT_TRUE(same_tensors(
      pretrain_whole_network(model, corpus, WholeVariant::kY2, opts).checkpoint, init, ""));
}

TEST(PretrainTest, EncoderCeOverfitsOneUtterance) {
  Corpus corpus = small_corpus(1);
  RnntModel model(tiny_config());
  model.init(5);
  Checkpoint init = snapshot(model);
  TrainOptions opts;
  opts.epochs = 150;
  opts.learning_rate = 2e-2;
  PretrainResult r = pretrain_encoder_ce(model, corpus, opts);
  ASSERT_TRUE(r.head.has_value());
  EXPECT_EQ(frame_accuracy(model, *r.head, corpus[0]), 1.0);
  // Only the encoder moved.
  EXPECT_FALSE(same_tensors(r.checkpoint, init, "encoder."));
  EXPECT_TRUE(same_tensors(r.checkpoint, init, "prediction."));
  EXPECT_TRUE(same_tensors(r.checkpoint, init, "joint."));
  EXPECT_EQ(r.manifest.variant, "enc-ce");
  EXPECT_EQ(r.manifest.corpus_hash, corpus_hash(corpus));

  // Transfer: the encoder slot of a fresh model takes the tensors bit-exactly.
  RnntModel fresh(tiny_config());
  fresh.init(99);
  restore(fresh, r.checkpoint, "encoder.");
  EXPECT_TRUE(same_tensors(snapshot(fresh), r.checkpoint, "encoder."));
}

TEST(PretrainTest, EncoderCtcOverfitsOneUtterance) {
  Corpus corpus = small_corpus(1);
  RnntModel model(tiny_config());
  model.init(6);
  TrainOptions opts;
  opts.epochs = 300;
  opts.learning_rate = 2e-2;
  PretrainResult r = pretrain_encoder_ctc(model, corpus, opts);
  EXPECT_LT(r.epochs.back().mean_loss, 0.1);
}

TEST(PretrainTest, LmMemorisesTwoSequences) {
  Corpus corpus(2);
  corpus[0].id = "a";
  corpus[0].transcript = {1, 2, 3, 4, 5, 6};
  corpus[1].id = "b";
  corpus[1].transcript = {1, 2, 3, 4, 5, 7};
  for (Utterance &u : corpus) u.features = Tensor({2, 8});
  RnntModel model(tiny_config());
  model.init(7);
  Checkpoint init = snapshot(model);
  TrainOptions opts;
  opts.epochs = 300;
  opts.learning_rate = 2e-2;
  PretrainResult r = pretrain_prediction_lm(model, corpus, opts);
  // The last token is a coin flip between the two sequences; everything
  // else is determined, so the per-token loss floor is ln(2) / 6.
  double floor = std::log(2.0) / 6.0;
  EXPECT_LT(r.epochs.back().mean_loss, floor + 0.01);
  EXPECT_LT(std::exp(r.epochs.back().mean_loss), 1.14);
  EXPECT_TRUE(same_tensors(r.checkpoint, init, "encoder."));
  EXPECT_FALSE(same_tensors(r.checkpoint, init, "prediction."));
}

TEST(PretrainTest, WholeNetworkY2OverfitDecodesTranscript) {
  Corpus corpus = small_corpus(1);
  RnntModel model(tiny_config());
  model.init(8);
  TrainOptions opts;
  opts.epochs = 200;
  opts.learning_rate = 2e-2;
  pretrain_whole_network(model, corpus, WholeVariant::kY2, opts);
  ModelScorer scorer(model, model_input(corpus[0], model.config()));
  EXPECT_EQ(greedy_decode(scorer).prefix, corpus[0].transcript);
}

TEST(PretrainTest, VariantOnlySelectsTheLabelBuilder) {
  Corpus corpus = small_corpus(4);
  TrainOptions opts;
  opts.epochs = 2;
  for (WholeVariant v : {WholeVariant::kY1, WholeVariant::kY2, WholeVariant::kY3}) {
    std::vector<LabelTensor> seen;
    LabelBuilder inner = label_builder(v);
    LabelBuilder spy = [&](const FrameAlignment &fa, std::span<const int> tokens, int blank) {
      seen.push_back(inner(fa, tokens, blank));
      return seen.back();
    };
    RnntModel a(tiny_config()), b(tiny_config());
    a.init(9);
    b.init(9);
    PretrainResult ra = pretrain_whole_network(a, corpus, v, opts);
    PretrainResult rb = pretrain_whole_network(b, corpus, spy, variant_name(v), opts);
    EXPECT_EQ(seen.size(), corpus.size() * opts.epochs);
    EXPECT_TRUE(same_tensors(ra.checkpoint, rb.checkpoint, ""));
    EXPECT_EQ(ra.manifest.final_loss, rb.manifest.final_loss);
    EXPECT_EQ(ra.manifest.variant, variant_name(v));
  }
}

TEST(PretrainTest, AllVariantsGiveFiniteLosses) {
  Corpus corpus = small_corpus(12);
  TrainOptions opts;
  opts.epochs = 1;
  for (WholeVariant v : {WholeVariant::kY1, WholeVariant::kY2, WholeVariant::kY3}) {
    RnntModel model(tiny_config());
    model.init(10);
    PretrainResult r = pretrain_whole_network(model, corpus, v, opts);
    EXPECT_TRUE(std::isfinite(r.manifest.final_loss));
    EXPECT_EQ(r.epochs.back().used, corpus.size());
  }
}

TEST(PretrainTest, DegenerateUtterancesAreSkippedAndCounted) {
  Corpus corpus = small_corpus(2);
  Utterance bad;
  bad.id = "bad";
  bad.features = Tensor({4, 8});
  bad.words = {WordSpan{"abc", {1, 2, 3}, 0, 2}};
  bad.transcript = {1, 2, 3};
  corpus.push_back(bad);
  TrainOptions opts;
  opts.epochs = 1;
  RnntModel model(tiny_config());
  model.init(11);
  EXPECT_EQ(pretrain_encoder_ce(model, corpus, opts).manifest.skipped, 1u);
  EXPECT_EQ(pretrain_whole_network(model, corpus, WholeVariant::kY3, opts).manifest.skipped, 1u);
}

TEST(PretrainTest, ManifestJsonRoundTrip) {
  PretrainManifest m{"y3", 10, "0123456789abcdef", 0.125, 2};
  nlohmann::json j = m;
  PretrainManifest back = j.get<PretrainManifest>();
  EXPECT_EQ(nlohmann::json(back), j);
}

}  // namespace
}  // namespace rnnt
