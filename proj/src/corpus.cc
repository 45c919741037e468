// rnnt-lab/src/corpus.cc

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

#include "rnnt/corpus.h"

#include <cstdio>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "rnnt/optim.h"

namespace rnnt {

namespace {

constexpr std::uint64_t kStreamStep = 0x9E3779B97F4A7C15ULL;

void check_range(const char *name, std::size_t lo, std::size_t hi) {
  if (lo > hi)
    throw InvalidArgument(std::string("corpus ") + name + " range is empty: [" +
                          std::to_string(lo) + ", " + std::to_string(hi) + "]");
}

Utterance make_utterance(const CorpusConfig &cfg, const Lexicon &lex, Rng &rng,
                         std::string id) {
  Utterance utt;
  utt.id = std::move(id);
  std::size_t nwords = uniform_range(rng, cfg.min_words, cfg.max_words);
  std::size_t t = 0;
  for (std::size_t w = 0; w < nwords; ++w) {
    if (w > 0) t += uniform_range(rng, cfg.min_gap, cfg.max_gap);
    WordSpan span;
    std::size_t npieces = uniform_range(rng, cfg.min_pieces, cfg.max_pieces);
    std::size_t frames = 0;
    for (std::size_t p = 0; p < npieces; ++p) {
      // Consecutive pieces differ so the frame alignment collapses back to
      // exactly this piece sequence.
      int piece;
      do {
        piece = 1 + static_cast<int>(uniform_index(rng, cfg.vocab_size - 1));
      } while (!span.pieces.empty() && span.pieces.back() == piece);
      span.pieces.push_back(piece);
      frames += uniform_range(rng, cfg.min_piece_frames, cfg.max_piece_frames);
      if (!span.word.empty()) span.word += '_';
      span.word += 'p' + std::to_string(piece);
    }
    span.start_frame = t;
    span.end_frame = t + frames;
    t += frames;
    utt.words.push_back(std::move(span));
  }
  FrameAlignment fa = build_frame_alignment(utt.words, t, kSpaceId);
  utt.transcript = collapse(fa);

  // Raw frame labels in units: each token segment is split evenly over its
  // pronunciation, earlier units taking the remainder.
  std::vector<int> units;
  for (const TokenSegment &seg : token_segments(fa)) {
    const auto &pron = lex.pronunciations[static_cast<std::size_t>(seg.token)];
    std::size_t n = (seg.end - seg.begin) * cfg.stride, L = pron.size();
    for (std::size_t p = 0; p < L; ++p)
      units.insert(units.end(), n / L + (p < n % L ? 1 : 0), pron[p]);
  }
  const std::size_t d = cfg.input_dim;
  const double a = cfg.coarticulation;
  utt.features = Tensor({units.size(), d});
  auto first = lex.units.row(static_cast<std::size_t>(units[0]));
  std::vector<double> mean(first.begin(), first.end());
  for (std::size_t r = 0; r < units.size(); ++r) {
    auto tmpl = lex.units.row(static_cast<std::size_t>(units[r]));
    auto row = utt.features.row(r);
    for (std::size_t k = 0; k < d; ++k) {
      mean[k] = a == 0.0 ? tmpl[k] : a * mean[k] + (1.0 - a) * tmpl[k];
      row[k] = mean[k] + cfg.noise * standard_normal(rng);
    }
  }
  return utt;
}

}  // namespace

void CorpusConfig::validate() const {
  if (vocab_size < 3)
    throw InvalidArgument("corpus vocab_size must be >= 3 (space + 2 pieces), got " +
                          std::to_string(vocab_size));
  if (input_dim == 0 || stride == 0) throw InvalidArgument("corpus input_dim/stride must be > 0");
  if (min_words == 0 || min_pieces == 0 || min_gap == 0)
    throw InvalidArgument("corpus min_words, min_pieces and min_gap must be >= 1");
  check_range("words", min_words, max_words);
  check_range("pieces", min_pieces, max_pieces);
  check_range("piece_frames", min_piece_frames, max_piece_frames);
  check_range("gap", min_gap, max_gap);
  if (min_piece_frames == 0) throw InvalidArgument("corpus min_piece_frames must be >= 1");
  if (!(noise >= 0.0)) throw InvalidArgument("corpus noise must be >= 0");
  if (phones_per_piece == 0) throw InvalidArgument("corpus phones_per_piece must be >= 1");
  if (phones_per_piece > min_piece_frames * stride)
    throw InvalidArgument("corpus phones_per_piece exceeds the raw frames of the shortest piece");
  if (phone_inventory > 0 &&
      std::pow(static_cast<double>(phone_inventory), static_cast<double>(phones_per_piece)) <
          static_cast<double>(vocab_size - 1))
    throw InvalidArgument("corpus phone_inventory too small for distinct pronunciations");
  if (!(coarticulation >= 0.0 && coarticulation < 1.0))
    throw InvalidArgument("corpus coarticulation must be in [0, 1)");
}

void to_json(nlohmann::json &j, const CorpusConfig &c) {
  j = {{"vocab_size", c.vocab_size},
       {"input_dim", c.input_dim},
       {"stride", c.stride},
       {"train_utterances", c.train_utterances},
       {"test_utterances", c.test_utterances},
       {"min_words", c.min_words},
       {"max_words", c.max_words},
       {"min_pieces", c.min_pieces},
       {"max_pieces", c.max_pieces},
       {"min_piece_frames", c.min_piece_frames},
       {"max_piece_frames", c.max_piece_frames},
       {"min_gap", c.min_gap},
       {"max_gap", c.max_gap},
       {"noise", c.noise},
       {"coarticulation", c.coarticulation},
       {"phones_per_piece", c.phones_per_piece},
       {"phone_inventory", c.phone_inventory},
       {"seed", c.seed}};
}

void from_json(const nlohmann::json &j, CorpusConfig &c) {
  CorpusConfig d;
  c.vocab_size = j.value("vocab_size", d.vocab_size);
  c.input_dim = j.value("input_dim", d.input_dim);
  c.stride = j.value("stride", d.stride);
  c.train_utterances = j.value("train_utterances", d.train_utterances);
  c.test_utterances = j.value("test_utterances", d.test_utterances);
  c.min_words = j.value("min_words", d.min_words);
  c.max_words = j.value("max_words", d.max_words);
  c.min_pieces = j.value("min_pieces", d.min_pieces);
  c.max_pieces = j.value("max_pieces", d.max_pieces);
  c.min_piece_frames = j.value("min_piece_frames", d.min_piece_frames);
  c.max_piece_frames = j.value("max_piece_frames", d.max_piece_frames);
  c.min_gap = j.value("min_gap", d.min_gap);
  c.max_gap = j.value("max_gap", d.max_gap);
  c.noise = j.value("noise", d.noise);
  c.coarticulation = j.value("coarticulation", d.coarticulation);
  c.phones_per_piece = j.value("phones_per_piece", d.phones_per_piece);
  c.phone_inventory = j.value("phone_inventory", d.phone_inventory);
  c.seed = j.value("seed", d.seed);
}

Lexicon make_lexicon(const CorpusConfig &cfg) {
  cfg.validate();
  Rng rng(cfg.seed);
  const std::size_t pieces = cfg.vocab_size - 1, L = cfg.phones_per_piece;
  const std::size_t num_units = 1 + (cfg.phone_inventory == 0 ? pieces * L : cfg.phone_inventory);
  Lexicon lex;
  lex.units = Tensor({num_units, cfg.input_dim});
  for (double &v : lex.units.data()) v = 2.0 * uniform01(rng) - 1.0;
  lex.pronunciations.push_back({0});
  std::set<std::vector<int>> used;
  for (std::size_t k = 0; k < pieces; ++k) {
    std::vector<int> pron(L);
    if (cfg.phone_inventory == 0) {
      for (std::size_t p = 0; p < L; ++p) pron[p] = static_cast<int>(1 + k * L + p);
    } else {
      do {
        for (int &u : pron) u = 1 + static_cast<int>(uniform_index(rng, cfg.phone_inventory));
      } while (!used.insert(pron).second);
    }
    lex.pronunciations.push_back(std::move(pron));
  }
  return lex;
}

CorpusSplit gen_corpus(const CorpusConfig &cfg) {
  Lexicon lex = make_lexicon(cfg);
  CorpusSplit out;
  Rng train_rng(cfg.seed + kStreamStep);
  Rng test_rng(cfg.seed + 2 * kStreamStep);
  char id[32];
  for (std::size_t i = 0; i < cfg.train_utterances; ++i) {
    std::snprintf(id, sizeof(id), "train-%05zu", i);
    out.train.push_back(make_utterance(cfg, lex, train_rng, id));
  }
  for (std::size_t i = 0; i < cfg.test_utterances; ++i) {
    std::snprintf(id, sizeof(id), "test-%05zu", i);
    out.test.push_back(make_utterance(cfg, lex, test_rng, id));
  }
  return out;
}

FrameAlignment utterance_alignment(const Utterance &utt, std::size_t stride) {
  std::size_t n = utt.features.empty() ? 0 : utt.features.dim(0);
  std::size_t T = (n + stride - 1) / stride;
  return build_frame_alignment(utt.words, T, kSpaceId);
}

nlohmann::json utterance_to_json(const Utterance &utt) {
  nlohmann::json features = nlohmann::json::array();
  for (std::size_t i = 0; i < utt.features.dim(0); ++i) {
    auto row = utt.features.row(i);
    features.push_back(std::vector<double>(row.begin(), row.end()));
  }
  nlohmann::json words = nlohmann::json::array();
  for (const WordSpan &w : utt.words)
    words.push_back(
        {{"word", w.word}, {"pieces", w.pieces}, {"start", w.start_frame}, {"end", w.end_frame}});
  return {{"id", utt.id}, {"features", features}, {"words", words}, {"transcript", utt.transcript}};
}

Utterance utterance_from_json(const nlohmann::json &j) {
  Utterance utt;
  utt.id = j.at("id").get<std::string>();
  const auto &rows = j.at("features");
  if (!rows.is_array() || rows.empty())
    throw InvalidArgument("utterance '" + utt.id + "' has no feature rows");
  std::size_t d = rows[0].size();
  std::vector<double> data;
  for (const auto &r : rows) {
    if (r.size() != d) throw InvalidArgument("utterance '" + utt.id + "' has ragged features");
    for (const auto &v : r) data.push_back(v.get<double>());
  }
  utt.features = Tensor({rows.size(), d}, std::move(data));
  for (const auto &w : j.at("words"))
    utt.words.push_back(WordSpan{w.at("word").get<std::string>(),
                                 w.at("pieces").get<std::vector<int>>(),
                                 w.at("start").get<std::size_t>(),
                                 w.at("end").get<std::size_t>()});
  utt.transcript = j.at("transcript").get<std::vector<int>>();
  return utt;
}

void write_corpus(const Corpus &corpus, std::ostream &os) {
  for (const Utterance &u : corpus) os << utterance_to_json(u).dump() << '\n';
}

Corpus read_corpus(std::istream &is) {
  Corpus out;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    if (line.empty()) continue;
    try {
      out.push_back(utterance_from_json(nlohmann::json::parse(line)));
    } catch (const nlohmann::json::exception &e) {
      throw InvalidArgument("corpus line " + std::to_string(lineno) + ": " + e.what());
    }
  }
  return out;
}

void save_corpus(const Corpus &corpus, const std::filesystem::path &path) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw InvalidArgument("cannot write " + path.string());
  write_corpus(corpus, os);
}

Corpus load_corpus(const std::filesystem::path &path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw InvalidArgument("cannot read " + path.string());
  return read_corpus(is);
}

std::string fnv1a_hex(const std::string &bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

std::string corpus_hash(const Corpus &corpus) {
  std::ostringstream os;
  write_corpus(corpus, os);
  return fnv1a_hex(os.str());
}

}  // namespace rnnt
