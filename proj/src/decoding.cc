// rnnt-lab/src/decoding.cc

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

#include "rnnt/decoding.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>

namespace rnnt {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

std::size_t argmax_lowest(std::span<const double> v) {
  std::size_t best = 0;
  for (std::size_t k = 1; k < v.size(); ++k)
    if (v[k] > v[best]) best = k;
  return best;
}

Hypothesis run_greedy(const Scorer &scorer, std::size_t cap, std::vector<int> *symbols) {
  if (cap == 0) throw InvalidArgument("max_symbols_per_frame must be >= 1");
  const std::size_t C = scorer.num_classes();
  const int blank = scorer.blank();
  Hypothesis h;
  h.state = scorer.initial_state();
  std::vector<double> lp(C);
  for (std::size_t t = 0; t < scorer.frames(); ++t) {
    for (std::size_t n = 0;; ++n) {
      scorer.log_probs(t, h.state, lp);
      int k = static_cast<int>(argmax_lowest(lp));
      if (k == blank || n == cap) {
        h.log_prob += lp[static_cast<std::size_t>(blank)];
        if (symbols) symbols->push_back(blank);
        break;
      }
      h.log_prob += lp[static_cast<std::size_t>(k)];
      h.prefix.push_back(k);
      h.emit_frames.push_back(t);
      h.state = scorer.extend(h.state, k);
      if (symbols) symbols->push_back(k);
    }
  }
  return h;
}

}  // namespace

ModelScorer::ModelScorer(RnntModel &model, const Tensor &x) : model_(model) {
  Tape tape;
  Tensor enc = model.encode(tape, x).value();
  for (std::size_t t = 0; t < enc.dim(0); ++t)
    enc_proj_.push_back(model.joint_net.project_encoder(enc.row(t)));
}

DecoderState ModelScorer::initial_state() const {
  DecoderState s;
  s.net = model_.prediction.start();
  s.proj = model_.joint_net.project_prediction(s.net.output);
  return s;
}

DecoderState ModelScorer::extend(const DecoderState &state, int token) const {
  DecoderState s;
  s.net = model_.prediction.extend(state.net, token);
  s.proj = model_.joint_net.project_prediction(s.net.output);
  s.emitted = state.emitted + 1;
  return s;
}

void ModelScorer::log_probs(std::size_t t, const DecoderState &state,
                            std::span<double> out) const {
  model_.joint_net.log_probs(enc_proj_.at(t), state.proj, out);
}

DecoderState LabelTensorScorer::extend(const DecoderState &state, int) const {
  DecoderState s;
  s.emitted = state.emitted + 1;
  return s;
}

void LabelTensorScorer::log_probs(std::size_t t, const DecoderState &state,
                                  std::span<double> out) const {
  std::fill(out.begin(), out.end(), kNegInf);
  int target = blank();
  if (state.emitted < label_.rows() && label_.masked(t, state.emitted))
    target = label_.target(t, state.emitted);
  out[static_cast<std::size_t>(target)] = 0.0;
}

Hypothesis greedy_decode(const Scorer &scorer, std::size_t max_symbols_per_frame) {
  return run_greedy(scorer, max_symbols_per_frame, nullptr);
}

std::vector<int> greedy_symbols(const Scorer &scorer, std::size_t max_symbols_per_frame) {
  std::vector<int> symbols;
  run_greedy(scorer, max_symbols_per_frame, &symbols);
  return symbols;
}

std::vector<Hypothesis> beam_search(const Scorer &scorer, std::size_t width,
                                    std::size_t max_symbols_per_frame) {
  if (width == 0) throw InvalidArgument("beam width must be >= 1");
  if (max_symbols_per_frame == 0) throw InvalidArgument("max_symbols_per_frame must be >= 1");
  const std::size_t C = scorer.num_classes();
  const int blank = scorer.blank();
  struct Candidate {
    std::size_t source;
    int token;
    double score;
  };
  auto by_score = [](const Candidate &a, const Candidate &b) { return a.score > b.score; };
  auto by_log_prob = [](const Hypothesis &a, const Hypothesis &b) {
    return a.log_prob > b.log_prob;
  };

  std::vector<Hypothesis> beam(1);
  beam[0].state = scorer.initial_state();
  std::vector<double> lp(C);
  for (std::size_t t = 0; t < scorer.frames(); ++t) {
    std::map<std::vector<int>, Hypothesis> advanced;
    std::vector<Hypothesis> live = std::move(beam);
    for (std::size_t round = 0; !live.empty(); ++round) {
      std::vector<Candidate> pool;
      for (std::size_t i = 0; i < live.size(); ++i) {
        scorer.log_probs(t, live[i].state, lp);
        for (std::size_t k = 0; k < C; ++k) {
          if (static_cast<int>(k) != blank && round == max_symbols_per_frame) continue;
          pool.push_back({i, static_cast<int>(k), live[i].log_prob + lp[k]});
        }
      }
      std::stable_sort(pool.begin(), pool.end(), by_score);
      if (pool.size() > width) pool.resize(width);
      std::vector<Hypothesis> next;
      for (const Candidate &c : pool) {
        const Hypothesis &src = live[c.source];
        if (c.token == blank) {
          auto [it, fresh] = advanced.try_emplace(src.prefix, src);
          if (fresh) {
            it->second.log_prob = c.score;
          } else {
            if (c.score > it->second.log_prob) it->second.emit_frames = src.emit_frames;
            it->second.log_prob = log_add(it->second.log_prob, c.score);
          }
          continue;
        }
        Hypothesis h;
        h.prefix = src.prefix;
        h.prefix.push_back(c.token);
        h.emit_frames = src.emit_frames;
        h.emit_frames.push_back(t);
        h.log_prob = c.score;
        h.state = scorer.extend(src.state, c.token);
        next.push_back(std::move(h));
      }
      live = std::move(next);
    }
    for (auto &[prefix, h] : advanced) beam.push_back(std::move(h));
    std::stable_sort(beam.begin(), beam.end(), by_log_prob);
    if (beam.size() > width) beam.resize(width);
  }
  return beam;
}

std::vector<Hypothesis> beam_decode(const Scorer &scorer, std::size_t width,
                                    std::size_t max_symbols_per_frame) {
  if (width == 0) throw InvalidArgument("beam width must be >= 1");
  std::map<std::vector<int>, Hypothesis> best;
  for (std::size_t w = 1; w <= width; ++w)
    for (Hypothesis &h : beam_search(scorer, w, max_symbols_per_frame)) {
      auto it = best.find(h.prefix);
      if (it == best.end())
        best.emplace(h.prefix, std::move(h));
      else if (h.log_prob > it->second.log_prob)
        it->second = std::move(h);
    }
  std::vector<Hypothesis> out;
  for (auto &[prefix, h] : best) out.push_back(std::move(h));
  std::stable_sort(out.begin(), out.end(),
                   [](const Hypothesis &a, const Hypothesis &b) { return a.log_prob > b.log_prob; });
  if (out.size() > width) out.resize(width);
  return out;
}

double DelayStats::mean() const {
  if (samples.empty()) return std::numeric_limits<double>::quiet_NaN();
  double s = 0.0;
  for (long d : samples) s += static_cast<double>(d);
  return s / static_cast<double>(samples.size());
}

std::map<long, std::size_t> DelayStats::histogram() const {
  std::map<long, std::size_t> h;
  for (long d : samples) ++h[d];
  return h;
}

void DelayStats::merge(const DelayStats &other) {
  samples.insert(samples.end(), other.samples.begin(), other.samples.end());
  utterances += other.utterances;
  skipped += other.skipped;
}

DelayStats measure_delay(const Hypothesis &hyp, std::span<const WordSpan> words,
                         std::span<const int> reference, int space_id) {
  DelayStats stats;
  if (!std::ranges::equal(hyp.prefix, reference)) {
    stats.skipped = 1;
    return stats;
  }
  if (hyp.emit_frames.size() != hyp.prefix.size())
    throw InvalidArgument("hypothesis has " + std::to_string(hyp.prefix.size()) +
                          " tokens but " + std::to_string(hyp.emit_frames.size()) +
                          " emission frames");
  stats.utterances = 1;
  for (std::size_t w = 0; std::size_t pos : word_first_piece_positions(words, reference, space_id))
    stats.samples.push_back(static_cast<long>(hyp.emit_frames[pos]) -
                            static_cast<long>(words[w++].start_frame));
  return stats;
}

nlohmann::json nbest_entry(const std::string &utt_id, const Hypothesis &hyp) {
  return {{"utt_id", utt_id},
          {"hyp_tokens", hyp.prefix},
          {"log_prob", hyp.log_prob},
          {"emit_frames", hyp.emit_frames}};
}

void write_delay_csv(const DelayStats &stats, std::ostream &os) {
  os << "bin,count\n";
  for (auto [bin, count] : stats.histogram()) os << bin << ',' << count << '\n';
  os << "mean," << (stats.empty() ? std::string("nan") : nlohmann::json(stats.mean()).dump())
     << '\n';
  os << "samples," << stats.samples.size() << '\n';
}

}  // namespace rnnt
