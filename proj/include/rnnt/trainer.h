// rnnt-lab/include/rnnt/trainer.h

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

#ifndef RNNT_TRAINER_H_
#define RNNT_TRAINER_H_

#include <cstdint>
#include <functional>
#include <optional>
#include <vector>

#include "json.hpp"
#include "rnnt/autograd.h"
#include "rnnt/corpus.h"
#include "rnnt/tensor.h"

namespace rnnt {

struct TrainOptions {
  std::size_t epochs = 10;
  double learning_rate = 1e-3;
  double clip_norm = 5.0;
  std::size_t batch_size = 1;
  std::uint64_t shuffle_seed = 1;
};

void to_json(nlohmann::json &j, const TrainOptions &o);
void from_json(const nlohmann::json &j, TrainOptions &o);

struct EpochReport {
  std::size_t epoch = 0;   // 1-based
  double mean_loss = 0.0;  // over the utterances that contributed
  std::size_t used = 0;
  std::size_t skipped = 0;
};

// Builds the scalar loss of one utterance on `tape`.  Returning nullopt, or
// throwing DegenerateUtterance, skips the utterance.
using UtteranceLoss = std::function<std::optional<Var>(Tape &, const Utterance &)>;
using EpochCallback = std::function<void(const EpochReport &)>;

// The one optimisation loop every schedule goes through: Adam with global
// norm clipping, utterances visited in a seeded shuffled order, gradients
// averaged over `batch_size` utterances per step.
std::vector<EpochReport> train_loop(const std::vector<Tensor *> &params, const Corpus &corpus,
                                    const TrainOptions &options, const UtteranceLoss &loss,
                                    const EpochCallback &on_epoch = {});

// Deterministic Fisher-Yates permutation of [0, n).
std::vector<std::size_t> shuffled_order(std::size_t n, std::uint64_t seed);

}  // namespace rnnt

#endif  // RNNT_TRAINER_H_
