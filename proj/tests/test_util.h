// rnnt-lab/tests/test_util.h

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

#ifndef RNNT_TESTS_TEST_UTIL_H_
#define RNNT_TESTS_TEST_UTIL_H_

#include <cmath>
#include <random>
#include <string>
#include <vector>

#include "rnnt/optim.h"
#include "rnnt/tensor.h"

namespace rnnt::testing {

inline double uniform(Rng &rng, double lo, double hi) {
  return lo + (hi - lo) * (static_cast<double>(rng() >> 11) * 0x1.0p-53);
}

inline Tensor random_tensor(Shape shape, Rng &rng, double lo = -1.0, double hi = 1.0) {
  Tensor t(std::move(shape));
  for (double &v : t.data()) v = uniform(rng, lo, hi);
  return t;
}

inline int random_int(Rng &rng, int lo, int hi) {  // inclusive
  return lo + static_cast<int>(rng() % static_cast<std::uint64_t>(hi - lo + 1));
}

// Non-blank targets drawn from [0, classes-1) with blank = classes-1.
inline std::vector<int> random_targets(Rng &rng, std::size_t U, std::size_t classes) {
  std::vector<int> y(U);
  for (int &v : y) v = random_int(rng, 0, static_cast<int>(classes) - 2);
  return y;
}

// CTC by enumerating every frame labelling in classes^T and keeping those
// that collapse (merge repeats, drop blanks) to the target.  Returns
// -log P(targets).
inline double ctc_enumeration(const Tensor &logits, const std::vector<int> &targets,
                              int blank) {
  const std::size_t T = logits.dim(0), K = logits.dim(1);
  const Tensor lp = log_softmax(logits);
  std::vector<int> path(T, 0);
  double total = 0.0;
  bool any = false;
  while (true) {
    std::vector<int> collapsed;
    int prev = -1;
    for (int c : path) {
      if (c != prev && c != blank) collapsed.push_back(c);
      prev = c;
    }
    if (collapsed == targets) {
      double s = 0.0;
      for (std::size_t t = 0; t < T; ++t) s += lp.at(t, path[t]);
      total += std::exp(s);
      any = true;
    }
    std::size_t i = 0;
    while (i < T && ++path[i] == static_cast<int>(K)) path[i++] = 0;
    if (i == T) break;
  }
  return any ? -std::log(total) : INFINITY;
}

// Transducer -log P(y|x) by walking every monotonic lattice path: each
// step emits the next label (stay on frame t) or a blank (advance t); a
// path ends with the blank emitted on the last frame after all labels.
inline constexpr std::size_t kEnumerationLimit = 14;  // on T + U

inline double rnnt_enumeration(const Tensor &logits, const std::vector<int> &targets,
                               int blank) {
  const std::size_t T = logits.dim(0), U = targets.size();
  if (logits.rank() != 3 || logits.dim(1) != U + 1)
    throw InvalidArgument("rnnt_enumeration: logits must be T x (U+1) x classes");
  if (T + U > kEnumerationLimit)
    throw InvalidArgument("rnnt_enumeration: T + U = " + std::to_string(T + U) +
                          " exceeds the enumeration bound");
  const Tensor lp = log_softmax(logits);
  std::vector<double> path_scores;
  auto walk = [&](auto &self, std::size_t t, std::size_t u, double score) -> void {
    if (t == T - 1 && u == U) {
      path_scores.push_back(score + lp.at(t, u, blank));
      return;
    }
    if (u < U) self(self, t, u + 1, score + lp.at(t, u, targets[u]));
    if (t + 1 < T) self(self, t + 1, u, score + lp.at(t, u, blank));
  };
  walk(walk, 0, 0, 0.0);
  return -logsumexp(path_scores);
}

}  // namespace rnnt::testing

#endif  // RNNT_TESTS_TEST_UTIL_H_
