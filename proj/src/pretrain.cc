// rnnt-lab/src/pretrain.cc

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

#include "rnnt/pretrain.h"

#include <fstream>

#include "rnnt/loss.h"
#include "rnnt/optim.h"

namespace rnnt {

namespace {

std::size_t num_classes_for(int blank) {
  if (blank < 1) throw InvalidArgument("blank id must be >= 1, got " + std::to_string(blank));
  return static_cast<std::size_t>(blank) + 1;
}

// Fixed seeds for the throwaway heads, one per schedule.
constexpr std::uint64_t kHeadSeed = 0x5eed0001;

FrameAlignment alignment_for(const Utterance &utt, const ModelConfig &cfg) {
  return utterance_alignment(utt, cfg.stride);
}

PretrainResult finish(RnntModel &model, const Corpus &corpus, std::string variant,
                      std::vector<EpochReport> epochs, std::size_t num_epochs) {
  PretrainResult r;
  r.checkpoint = snapshot(model);
  r.manifest.variant = std::move(variant);
  r.manifest.epochs = num_epochs;
  r.manifest.corpus_hash = corpus_hash(corpus);
  if (!epochs.empty()) {
    r.manifest.final_loss = epochs.back().mean_loss;
    r.manifest.skipped = epochs.back().skipped;
  }
  r.epochs = std::move(epochs);
  return r;
}

std::vector<Tensor *> concat(std::vector<Tensor *> a, LinearHead &head) {
  a.push_back(&head.weight);
  a.push_back(&head.bias);
  return a;
}

}  // namespace

std::vector<std::size_t> frame_token_index(const FrameAlignment &fa,
                                           std::span<const int> tokens) {
  std::vector<TokenSegment> segs = token_segments(fa);
  if (segs.size() != tokens.size())
    throw InvalidArgument("alignment has " + std::to_string(segs.size()) +
                          " token segments but the transcript has " +
                          std::to_string(tokens.size()) + " tokens");
  std::vector<std::size_t> index(fa.size());
  for (std::size_t i = 0; i < segs.size(); ++i) {
    if (segs[i].token != tokens[i])
      throw InvalidArgument("alignment and transcript disagree at token " + std::to_string(i));
    for (std::size_t t = segs[i].begin; t < segs[i].end; ++t) index[t] = i;
  }
  return index;
}

LabelTensor build_y1(const FrameAlignment &fa, std::span<const int> tokens, int blank) {
  if (fa.size() == 0) throw InvalidArgument("empty frame alignment");
  if (!tokens.empty()) frame_token_index(fa, tokens);
  const std::size_t U = tokens.size();
  LabelTensor y(fa.size(), U + 1, num_classes_for(blank));
  for (std::size_t t = 0; t < fa.size(); ++t) {
    for (std::size_t u = 0; u < U; ++u) y.set(t, u, fa.labels[t]);
    y.set(t, U, blank);
  }
  return y;
}

LabelTensor build_y2(const FrameAlignment &fa, std::span<const int> tokens, int blank) {
  if (fa.size() == 0) throw InvalidArgument("empty frame alignment");
  std::vector<std::size_t> u_of = frame_token_index(fa, tokens);
  LabelTensor y(fa.size(), tokens.size() + 1, num_classes_for(blank));
  for (std::size_t t = 0; t < fa.size(); ++t) {
    y.set(t, u_of[t], tokens[u_of[t]]);
    y.set(t, u_of[t] + 1, blank);
  }
  return y;
}

LabelTensor build_y3(const FrameAlignment &fa, std::span<const int> tokens, int blank,
                     int space_id) {
  if (fa.size() == 0) throw InvalidArgument("empty frame alignment");
  std::vector<std::size_t> u_of = frame_token_index(fa, tokens);
  LabelTensor y(fa.size(), tokens.size() + 1, num_classes_for(blank));
  for (std::size_t t = 0; t < fa.size(); ++t) y.set(t, u_of[t], tokens[u_of[t]]);
  for (auto [b, e] : short_pause_spans(fa, space_id))
    for (std::size_t t = b; t < e; ++t) y.set(t, u_of[t], blank);
  return y;
}

std::string variant_name(WholeVariant v) {
  switch (v) {
    case WholeVariant::kY1: return "y1";
    case WholeVariant::kY2: return "y2";
    case WholeVariant::kY3: return "y3";
  }
  return "?";
}

WholeVariant parse_whole_variant(const std::string &name) {
  if (name == "y1") return WholeVariant::kY1;
  if (name == "y2") return WholeVariant::kY2;
  if (name == "y3") return WholeVariant::kY3;
  throw InvalidArgument("unknown label tensor variant '" + name + "' (y1, y2, y3)");
}

LabelBuilder label_builder(WholeVariant v, int space_id) {
  switch (v) {
    case WholeVariant::kY1: return build_y1;
    case WholeVariant::kY2: return build_y2;
    case WholeVariant::kY3:
      return [space_id](const FrameAlignment &fa, std::span<const int> tokens, int blank) {
        return build_y3(fa, tokens, blank, space_id);
      };
  }
  throw InvalidArgument("bad variant");
}

void to_json(nlohmann::json &j, const PretrainManifest &m) {
  j = {{"variant", m.variant},
       {"epochs", m.epochs},
       {"corpus_hash", m.corpus_hash},
       {"final_loss", m.final_loss},
       {"skipped", m.skipped}};
}

void from_json(const nlohmann::json &j, PretrainManifest &m) {
  m.variant = j.at("variant").get<std::string>();
  m.epochs = j.at("epochs").get<std::size_t>();
  m.corpus_hash = j.at("corpus_hash").get<std::string>();
  m.final_loss = j.at("final_loss").get<double>();
  m.skipped = j.value("skipped", std::size_t{0});
}

void save_manifest(const PretrainManifest &m, const std::filesystem::path &path) {
  std::ofstream os(path);
  if (!os) throw InvalidArgument("cannot write " + path.string());
  os << nlohmann::json(m).dump(2) << '\n';
}

Tensor model_input(const Utterance &utt, const ModelConfig &cfg) {
  if (utt.features.rank() != 2 || utt.features.dim(1) != cfg.input_dim)
    throw InvalidArgument("utterance '" + utt.id + "' features are " +
                          shape_string(utt.features.shape()) + ", model expects width " +
                          std::to_string(cfg.input_dim));
  return stack_frames(utt.features, cfg.stack_factor, cfg.stride);
}

PretrainResult pretrain_encoder_ce(RnntModel &model, const Corpus &corpus,
                                   const TrainOptions &options) {
  const ModelConfig &cfg = model.config();
  LinearHead head(cfg.hidden, cfg.vocab_size);
  Rng rng(kHeadSeed);
  head.init(rng);
  auto loss = [&](Tape &tape, const Utterance &utt) -> std::optional<Var> {
    FrameAlignment fa = alignment_for(utt, cfg);
    Var h = model.encode(tape, model_input(utt, cfg));
    return frame_ce_loss(head.forward(tape, h), fa.labels);
  };
  auto reports = train_loop(concat(model.parameters("encoder."), head), corpus, options, loss);
  PretrainResult r = finish(model, corpus, "enc-ce", std::move(reports), options.epochs);
  r.head = std::move(head);
  return r;
}

PretrainResult pretrain_encoder_ctc(RnntModel &model, const Corpus &corpus,
                                    const TrainOptions &options) {
  const ModelConfig &cfg = model.config();
  LinearHead head(cfg.hidden, cfg.num_classes());
  Rng rng(kHeadSeed + 1);
  head.init(rng);
  auto loss = [&](Tape &tape, const Utterance &utt) -> std::optional<Var> {
    Tensor x = model_input(utt, cfg);
    if (utt.transcript.empty() || x.dim(0) < ctc_min_frames(utt.transcript))
      return std::nullopt;
    Var h = model.encode(tape, x);
    return ctc_loss(head.forward(tape, h), utt.transcript, cfg.blank());
  };
  auto reports = train_loop(concat(model.parameters("encoder."), head), corpus, options, loss);
  PretrainResult r = finish(model, corpus, "enc-ctc", std::move(reports), options.epochs);
  r.head = std::move(head);
  return r;
}

PretrainResult pretrain_prediction_lm(RnntModel &model, const Corpus &corpus,
                                      const TrainOptions &options) {
  const ModelConfig &cfg = model.config();
  LinearHead head(cfg.hidden, cfg.vocab_size);
  Rng rng(kHeadSeed + 2);
  head.init(rng);
  auto loss = [&](Tape &tape, const Utterance &utt) -> std::optional<Var> {
    if (utt.transcript.empty()) return std::nullopt;
    Var p = model.predict(tape, utt.transcript);
    return lm_ce_loss(head.forward(tape, p), utt.transcript);
  };
  auto reports =
      train_loop(concat(model.parameters("prediction."), head), corpus, options, loss);
  PretrainResult r = finish(model, corpus, "lm", std::move(reports), options.epochs);
  r.head = std::move(head);
  return r;
}

PretrainResult pretrain_whole_network(RnntModel &model, const Corpus &corpus,
                                      const LabelBuilder &builder, const std::string &name,
                                      const TrainOptions &options) {
  const ModelConfig &cfg = model.config();
  auto loss = [&](Tape &tape, const Utterance &utt) -> std::optional<Var> {
    FrameAlignment fa = alignment_for(utt, cfg);
    LabelTensor label = builder(fa, utt.transcript, cfg.blank());
    Var z = model.logits(tape, model_input(utt, cfg), utt.transcript);
    return masked_ce_3d(z, label);
  };
  auto reports = train_loop(model.parameters(), corpus, options, loss);
  return finish(model, corpus, name, std::move(reports), options.epochs);
}

PretrainResult pretrain_whole_network(RnntModel &model, const Corpus &corpus,
                                      WholeVariant variant, const TrainOptions &options) {
  return pretrain_whole_network(model, corpus, label_builder(variant), variant_name(variant),
                                options);
}

double frame_accuracy(RnntModel &model, LinearHead &head, const Utterance &utt) {
  const ModelConfig &cfg = model.config();
  FrameAlignment fa = alignment_for(utt, cfg);
  Tape tape;
  Tensor z = head.forward(tape, model.encode(tape, model_input(utt, cfg))).value();
  std::size_t correct = 0;
  for (std::size_t t = 0; t < fa.size(); ++t) {
    auto row = z.row(t);
    std::size_t best = 0;
    for (std::size_t k = 1; k < row.size(); ++k)
      if (row[k] > row[best]) best = k;
    correct += static_cast<int>(best) == fa.labels[t];
  }
  return static_cast<double>(correct) / static_cast<double>(fa.size());
}

}  // namespace rnnt
