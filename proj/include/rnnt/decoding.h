// rnnt-lab/include/rnnt/decoding.h

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

#ifndef RNNT_DECODING_H_
#define RNNT_DECODING_H_

#include <iosfwd>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "json.hpp"
#include "rnnt/alignment.h"
#include "rnnt/corpus.h"
#include "rnnt/label_tensor.h"
#include "rnnt/model.h"

namespace rnnt {

// Prediction-side state of a hypothesis.  `emitted` counts tokens so far,
// i.e. the row u of the lattice the hypothesis sits on.
struct DecoderState {
  PredictionNetwork::State net;
  std::vector<double> proj;  // joint projection of net.output
  std::size_t emitted = 0;
};

// What the decoders need from a model: per-frame, per-state log-probs over
// all classes (blank last) and a way to feed emitted tokens back.
class Scorer {
 public:
  virtual ~Scorer() = default;
  virtual std::size_t frames() const = 0;
  virtual std::size_t num_classes() const = 0;
  int blank() const { return static_cast<int>(num_classes()) - 1; }
  virtual DecoderState initial_state() const = 0;
  virtual DecoderState extend(const DecoderState &state, int token) const = 0;
  virtual void log_probs(std::size_t t, const DecoderState &state,
                         std::span<double> out) const = 0;
};

// A trained transducer on one input.  The (causal) encoder runs once up
// front; the prediction network steps as tokens are emitted.
class ModelScorer : public Scorer {
 public:
  ModelScorer(RnntModel &model, const Tensor &x);
  std::size_t frames() const override { return enc_proj_.size(); }
  std::size_t num_classes() const override { return model_.config().num_classes(); }
  DecoderState initial_state() const override;
  DecoderState extend(const DecoderState &state, int token) const override;
  void log_probs(std::size_t t, const DecoderState &state, std::span<double> out) const override;

 private:
  RnntModel &model_;
  std::vector<std::vector<double>> enc_proj_;
};

// A label tensor read as log-probs: a masked cell puts probability one on
// its target, an unmasked cell (or a row past the end) on blank.
class LabelTensorScorer : public Scorer {
 public:
  explicit LabelTensorScorer(const LabelTensor &label) : label_(label) {}
  std::size_t frames() const override { return label_.frames(); }
  std::size_t num_classes() const override { return label_.classes(); }
  DecoderState initial_state() const override { return {}; }
  DecoderState extend(const DecoderState &state, int token) const override;
  void log_probs(std::size_t t, const DecoderState &state, std::span<double> out) const override;

 private:
  const LabelTensor &label_;
};

struct Hypothesis {
  std::vector<int> prefix;
  double log_prob = 0.0;
  DecoderState state;
  std::vector<std::size_t> emit_frames;  // frame of each prefix token
};

inline constexpr std::size_t kDefaultMaxSymbolsPerFrame = 4;

// Per frame: emit the argmax while it is not blank (lowest id on ties), then
// advance.  After max_symbols_per_frame emissions on one frame a blank is
// forced and its log-prob counted.
Hypothesis greedy_decode(const Scorer &scorer,
                         std::size_t max_symbols_per_frame = kDefaultMaxSymbolsPerFrame);

// Every decision made by greedy_decode, one symbol per step (blank = the
// scorer's blank id).  Lets callers print the full emission string.
std::vector<int> greedy_symbols(const Scorer &scorer,
                                std::size_t max_symbols_per_frame = kDefaultMaxSymbolsPerFrame);

// One frame-synchronous beam pass.  Within a frame, each round pools the
// blank (advance) and token (stay) extensions of the live hypotheses and
// keeps the best `width`; advanced hypotheses with equal prefixes are merged
// by log-add.  Returns up to `width` hypotheses, best first.
std::vector<Hypothesis> beam_search(const Scorer &scorer, std::size_t width,
                                    std::size_t max_symbols_per_frame = kDefaultMaxSymbolsPerFrame);

// n-best list of the union of beam_search at widths 1..width, one entry
// per prefix with its best score.  Best first; at most `width` entries.
std::vector<Hypothesis> beam_decode(const Scorer &scorer, std::size_t width,
                                    std::size_t max_symbols_per_frame = kDefaultMaxSymbolsPerFrame);

// Per-word emission delay in encoder frames: frame at which a word's first
// piece was emitted minus the word's reference start frame.
struct DelayStats {
  std::vector<long> samples;
  std::size_t utterances = 0;  // measured
  std::size_t skipped = 0;     // hypothesis != reference

  bool empty() const { return samples.empty(); }
  double mean() const;
  std::map<long, std::size_t> histogram() const;  // unit-frame bins
  void merge(const DelayStats &other);
};

// Only a correctly recognised utterance is measured; otherwise the result
// has skipped = 1 and no samples.
DelayStats measure_delay(const Hypothesis &hyp, std::span<const WordSpan> words,
                         std::span<const int> reference, int space_id = kSpaceId);

nlohmann::json nbest_entry(const std::string &utt_id, const Hypothesis &hyp);
// "bin,count" rows, then "mean,<value>" and "samples,<n>".
void write_delay_csv(const DelayStats &stats, std::ostream &os);

}  // namespace rnnt

#endif  // RNNT_DECODING_H_
