// rnnt-lab/src/alignment.cc

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

#include "rnnt/alignment.h"

#include "rnnt/tensor.h"

namespace rnnt {

std::vector<std::size_t> allocate_frames(const WordSpan &span) {
  if (span.end_frame <= span.start_frame)
    throw InvalidArgument("word '" + span.word + "' has an empty frame span");
  if (span.pieces.empty()) throw InvalidArgument("word '" + span.word + "' has no pieces");
  const std::size_t frames = span.length(), n = span.pieces.size();
  if (n > frames)
    throw DegenerateUtterance("word '" + span.word + "' has " + std::to_string(n) +
                              " pieces but only " + std::to_string(frames) + " frames");
  std::vector<std::size_t> counts(n, frames / n);
  for (std::size_t i = 0; i < frames % n; ++i) ++counts[i];
  return counts;
}

FrameAlignment build_frame_alignment(std::span<const WordSpan> spans, std::size_t T,
                                     int space_id) {
  FrameAlignment fa{std::vector<int>(T, space_id)};
  std::size_t prev_end = 0;
  for (const WordSpan &w : spans) {
    if (w.start_frame < prev_end)
      throw InvalidArgument("word '" + w.word + "' overlaps or precedes the previous word");
    if (w.end_frame > T)
      throw InvalidArgument("word '" + w.word + "' ends at frame " +
                            std::to_string(w.end_frame) + " past T = " + std::to_string(T));
    std::vector<std::size_t> counts = allocate_frames(w);
    std::size_t t = w.start_frame;
    for (std::size_t p = 0; p < counts.size(); ++p)
      for (std::size_t k = 0; k < counts[p]; ++k) fa.labels[t++] = w.pieces[p];
    prev_end = w.end_frame;
  }
  return fa;
}

std::vector<std::pair<std::size_t, std::size_t>> short_pause_spans(const FrameAlignment &fa,
                                                                   int space_id,
                                                                   std::size_t max_len) {
  std::vector<std::pair<std::size_t, std::size_t>> out;
  for (const TokenSegment &s : token_segments(fa))
    if (s.token == space_id && s.end - s.begin <= max_len) out.emplace_back(s.begin, s.end);
  return out;
}

std::vector<TokenSegment> token_segments(const FrameAlignment &fa) {
  std::vector<TokenSegment> out;
  for (std::size_t t = 0; t < fa.size(); ++t) {
    if (!out.empty() && out.back().token == fa.labels[t])
      out.back().end = t + 1;
    else
      out.push_back({fa.labels[t], t, t + 1});
  }
  return out;
}

std::vector<int> collapse(const FrameAlignment &fa) {
  std::vector<int> out;
  for (const TokenSegment &s : token_segments(fa)) out.push_back(s.token);
  return out;
}

std::vector<std::size_t> word_first_piece_positions(std::span<const WordSpan> spans,
                                                    std::span<const int> transcript,
                                                    int space_id) {
  std::vector<std::size_t> out;
  std::size_t pos = 0;
  for (const WordSpan &w : spans) {
    while (pos < transcript.size() && transcript[pos] == space_id) ++pos;
    if (pos + w.pieces.size() > transcript.size())
      throw InvalidArgument("transcript is shorter than its words");
    for (std::size_t p = 0; p < w.pieces.size(); ++p)
      if (transcript[pos + p] != w.pieces[p])
        throw InvalidArgument("transcript does not spell word '" + w.word + "'");
    out.push_back(pos);
    pos += w.pieces.size();
  }
  return out;
}

}  // namespace rnnt
