// rnnt-lab/include/rnnt/corpus.h

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

#ifndef RNNT_CORPUS_H_
#define RNNT_CORPUS_H_

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "json.hpp"
#include "rnnt/alignment.h"
#include "rnnt/tensor.h"

namespace rnnt {

// Token id 0 is the space token; content pieces are 1 .. vocab_size-1 and
// the blank class (vocab_size) never appears in a corpus.
inline constexpr int kSpaceId = 0;

struct Utterance {
  std::string id;
  Tensor features;               // [N x input_dim] raw frames
  std::vector<WordSpan> words;   // spans in encoder frames
  std::vector<int> transcript;   // pieces with a space between words

  bool operator==(const Utterance &) const = default;
};

using Corpus = std::vector<Utterance>;

// Parameters of the synthetic corpus.  Durations are in encoder frames;
// every encoder frame is rendered as `stride` raw frames.
struct CorpusConfig {
  std::size_t vocab_size = 8;  // space + content pieces
  std::size_t input_dim = 8;
  std::size_t stride = 2;
  std::size_t train_utterances = 200;
  std::size_t test_utterances = 50;
  std::size_t min_words = 2, max_words = 4;
  std::size_t min_pieces = 1, max_pieces = 3;
  std::size_t min_piece_frames = 2, max_piece_frames = 6;
  std::size_t min_gap = 1, max_gap = 4;
  double noise = 0.5;
  // Raw frame r renders a*m[r-1] + (1-a)*template, so each token fades in
  // from its predecessor.  0 gives flat templates.
  double coarticulation = 0.0;
  // Each content piece is pronounced as a sequence of phones_per_piece
  // sub-unit templates.  With phone_inventory = 0 every piece owns its units;
  // otherwise units come from a shared inventory of that size, so pieces can
  // start alike.  Silence always has a unit of its own.
  std::size_t phones_per_piece = 1;
  std::size_t phone_inventory = 0;
  std::uint64_t seed = 1;

  void validate() const;
};

void to_json(nlohmann::json &j, const CorpusConfig &c);
void from_json(const nlohmann::json &j, CorpusConfig &c);

// Unit templates (entries uniform in [-1, 1], row 0 = silence) and the
// unit sequence of every token id.  Depends only on the seed.  With the
// default one private unit per piece, unit k is the template of token k.
struct Lexicon {
  Tensor units;                                // [num_units x input_dim]
  std::vector<std::vector<int>> pronunciations;  // indexed by token id
};
Lexicon make_lexicon(const CorpusConfig &cfg);

struct CorpusSplit {
  Corpus train;
  Corpus test;
};

// Train and test are drawn from independent streams derived from the seed.
CorpusSplit gen_corpus(const CorpusConfig &cfg);

// Encoder-frame alignment of an utterance (T = N / stride).
FrameAlignment utterance_alignment(const Utterance &utt, std::size_t stride);

nlohmann::json utterance_to_json(const Utterance &utt);
Utterance utterance_from_json(const nlohmann::json &j);

void write_corpus(const Corpus &corpus, std::ostream &os);
Corpus read_corpus(std::istream &is);
void save_corpus(const Corpus &corpus, const std::filesystem::path &path);
Corpus load_corpus(const std::filesystem::path &path);

// FNV-1a over the JSON-lines serialization, as 16 hex digits.
std::string corpus_hash(const Corpus &corpus);
std::string fnv1a_hex(const std::string &bytes);

}  // namespace rnnt

#endif  // RNNT_CORPUS_H_
