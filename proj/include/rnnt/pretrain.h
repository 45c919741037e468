// rnnt-lab/include/rnnt/pretrain.h

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

#ifndef RNNT_PRETRAIN_H_
#define RNNT_PRETRAIN_H_

#include <filesystem>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "json.hpp"
#include "rnnt/alignment.h"
#include "rnnt/checkpoint.h"
#include "rnnt/corpus.h"
#include "rnnt/label_tensor.h"
#include "rnnt/model.h"
#include "rnnt/trainer.h"

namespace rnnt {

// Label tensors for whole-network CE pre-training.  `tokens` is the
// transcript (collapse of `fa`), the blank is the last class, so every
// tensor has blank + 1 classes and U + 1 rows.

// Every cell of row u < U carries the frame's alignment label; row U is all
// blank.  All cells are masked.
LabelTensor build_y1(const FrameAlignment &fa, std::span<const int> tokens, int blank);

// Each frame t sits on the row u(t) of the token covering it: (t, u(t))
// carries that token and (t, u(t) + 1) carries blank.  2T masked cells.
LabelTensor build_y2(const FrameAlignment &fa, std::span<const int> tokens, int blank);

// The token half of y2 only (T masked cells), with frames inside short
// pauses retargeted to blank.
LabelTensor build_y3(const FrameAlignment &fa, std::span<const int> tokens, int blank,
                     int space_id);

// Row index of the token covering each frame.  Throws InvalidArgument when
// collapse(fa) != tokens.
std::vector<std::size_t> frame_token_index(const FrameAlignment &fa,
                                           std::span<const int> tokens);

enum class WholeVariant { kY1, kY2, kY3 };
std::string variant_name(WholeVariant v);
WholeVariant parse_whole_variant(const std::string &name);

using LabelBuilder = std::function<LabelTensor(const FrameAlignment &fa,
                                               std::span<const int> tokens, int blank)>;
LabelBuilder label_builder(WholeVariant v, int space_id = kSpaceId);

// Sidecar written next to a pre-trained checkpoint.
struct PretrainManifest {
  std::string variant;
  std::size_t epochs = 0;
  std::string corpus_hash;
  double final_loss = 0.0;
  std::size_t skipped = 0;
};
void to_json(nlohmann::json &j, const PretrainManifest &m);
void from_json(const nlohmann::json &j, PretrainManifest &m);
void save_manifest(const PretrainManifest &m, const std::filesystem::path &path);

struct PretrainResult {
  Checkpoint checkpoint;  // the whole model; callers restore the part they need
  PretrainManifest manifest;
  std::vector<EpochReport> epochs;
  // Throwaway classifier of the encoder and LM schedules.  Never transferred.
  std::optional<LinearHead> head;
};

// Encoder + fresh head [hidden -> vocab] trained with frame CE against the
// frame alignment.  Only "encoder." tensors change.
PretrainResult pretrain_encoder_ce(RnntModel &model, const Corpus &corpus,
                                   const TrainOptions &options);

// Encoder + fresh head [hidden -> vocab + 1] trained with CTC on the
// transcripts, blank shared with the transducer.
PretrainResult pretrain_encoder_ctc(RnntModel &model, const Corpus &corpus,
                                    const TrainOptions &options);

// Prediction network + fresh head [hidden -> vocab] trained as a next-token
// language model on the transcripts.  Only "prediction." tensors change.
PretrainResult pretrain_prediction_lm(RnntModel &model, const Corpus &corpus,
                                      const TrainOptions &options);

// All three components trained with masked 3-D CE against the label tensor
// produced by `builder`.  Nothing is frozen.
PretrainResult pretrain_whole_network(RnntModel &model, const Corpus &corpus,
                                      const LabelBuilder &builder, const std::string &name,
                                      const TrainOptions &options);
PretrainResult pretrain_whole_network(RnntModel &model, const Corpus &corpus,
                                      WholeVariant variant, const TrainOptions &options);

// Stacked encoder input of an utterance for `cfg`.
Tensor model_input(const Utterance &utt, const ModelConfig &cfg);

// Fraction of frames whose head argmax equals `frame_labels`.
double frame_accuracy(RnntModel &model, LinearHead &head, const Utterance &utt);

}  // namespace rnnt

#endif  // RNNT_PRETRAIN_H_
