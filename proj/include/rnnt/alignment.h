// rnnt-lab/include/rnnt/alignment.h

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

#ifndef RNNT_ALIGNMENT_H_
#define RNNT_ALIGNMENT_H_

#include <cstddef>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace rnnt {

// A word with its word-piece ids and its frame span [start_frame, end_frame)
// in encoder (post-stacking) frames.
struct WordSpan {
  std::string word;
  std::vector<int> pieces;
  std::size_t start_frame = 0;
  std::size_t end_frame = 0;

  std::size_t length() const { return end_frame - start_frame; }
  bool operator==(const WordSpan &) const = default;
};

// One token id per encoder frame.  Frames between words carry the space id.
struct FrameAlignment {
  std::vector<int> labels;

  std::size_t size() const { return labels.size(); }
  bool operator==(const FrameAlignment &) const = default;
};

// A word has more pieces than frames, so no frame-level alignment exists;
// the utterance has to be dropped.
class DegenerateUtterance : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Splits the span's frames over its pieces as evenly as possible; the first
// (length % pieces) pieces get one extra frame.
std::vector<std::size_t> allocate_frames(const WordSpan &span);

// Frame-level targets for T encoder frames.  Spans must be sorted,
// non-overlapping and inside [0, T).
FrameAlignment build_frame_alignment(std::span<const WordSpan> spans, std::size_t T,
                                     int space_id);

// Maximal runs of space_id no longer than max_len frames, as half-open
// [begin, end) ranges.
std::vector<std::pair<std::size_t, std::size_t>> short_pause_spans(
    const FrameAlignment &fa, int space_id, std::size_t max_len = 2);

// A maximal run of identical labels: [begin, end) carrying `token`.
struct TokenSegment {
  int token;
  std::size_t begin;
  std::size_t end;
};
std::vector<TokenSegment> token_segments(const FrameAlignment &fa);

// Collapses runs of identical labels: the token sequence the alignment
// spells out, spaces included.
std::vector<int> collapse(const FrameAlignment &fa);

// Index in the transcript of each word's first piece.  The transcript is
// collapse() of the alignment built from the same spans.
std::vector<std::size_t> word_first_piece_positions(std::span<const WordSpan> spans,
                                                    std::span<const int> transcript,
                                                    int space_id);

}  // namespace rnnt

#endif  // RNNT_ALIGNMENT_H_
