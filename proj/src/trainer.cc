// rnnt-lab/src/trainer.cc

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

#include "rnnt/trainer.h"

#include <cmath>
#include <numeric>

#include "rnnt/alignment.h"
#include "rnnt/optim.h"

namespace rnnt {

void to_json(nlohmann::json &j, const TrainOptions &o) {
  j = {{"epochs", o.epochs},
       {"learning_rate", o.learning_rate},
       {"clip_norm", o.clip_norm},
       {"batch_size", o.batch_size},
       {"shuffle_seed", o.shuffle_seed}};
}

void from_json(const nlohmann::json &j, TrainOptions &o) {
  TrainOptions d;
  o.epochs = j.value("epochs", d.epochs);
  o.learning_rate = j.value("learning_rate", d.learning_rate);
  o.clip_norm = j.value("clip_norm", d.clip_norm);
  o.batch_size = j.value("batch_size", d.batch_size);
  o.shuffle_seed = j.value("shuffle_seed", d.shuffle_seed);
}

std::vector<std::size_t> shuffled_order(std::size_t n, std::uint64_t seed) {
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  Rng rng(seed);
  for (std::size_t i = n; i > 1; --i) std::swap(order[i - 1], order[uniform_index(rng, i)]);
  return order;
}

std::vector<EpochReport> train_loop(const std::vector<Tensor *> &params, const Corpus &corpus,
                                    const TrainOptions &options, const UtteranceLoss &loss,
                                    const EpochCallback &on_epoch) {
  if (options.batch_size == 0) throw InvalidArgument("batch_size must be >= 1");
  if (!(options.learning_rate > 0.0)) throw InvalidArgument("learning_rate must be > 0");
  AdamOptions adam_opts;
  adam_opts.learning_rate = options.learning_rate;
  adam_opts.clip_norm = options.clip_norm;
  Adam adam(params, adam_opts);
  const double inv_batch = 1.0 / static_cast<double>(options.batch_size);

  std::vector<EpochReport> reports;
  for (std::size_t epoch = 1; epoch <= options.epochs; ++epoch) {
    EpochReport rep;
    rep.epoch = epoch;
    double total = 0.0;
    std::size_t pending = 0;
    for (std::size_t idx : shuffled_order(corpus.size(), options.shuffle_seed + epoch)) {
      Tape tape;
      std::optional<Var> l;
      try {
        l = loss(tape, corpus[idx]);
      } catch (const DegenerateUtterance &) {
        l.reset();
      }
      if (!l) {
        ++rep.skipped;
        continue;
      }
      double value = l->value()[0];
      if (!std::isfinite(value))
        throw InvalidArgument("non-finite loss on utterance '" + corpus[idx].id + "'");
      tape.backward(scale(*l, inv_batch));
      total += value;
      ++rep.used;
      if (++pending == options.batch_size) {
        adam.step();
        pending = 0;
      }
    }
    if (pending > 0) adam.step();
    rep.mean_loss = rep.used > 0 ? total / static_cast<double>(rep.used) : 0.0;
    reports.push_back(rep);
    if (on_epoch) on_epoch(rep);
  }
  return reports;
}

}  // namespace rnnt
