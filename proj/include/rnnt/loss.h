// rnnt-lab/include/rnnt/loss.h

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

#ifndef RNNT_LOSS_H_
#define RNNT_LOSS_H_

#include <span>

#include "rnnt/autograd.h"
#include "rnnt/label_tensor.h"
#include "rnnt/tensor.h"

namespace rnnt {

// Negative log-likelihood (or mean CE) together with its exact gradient
// w.r.t. the unnormalized logits it was computed from.
struct LossOutput {
  double value = 0.0;
  Tensor grad_logits;
};

// Log-domain forward/backward variables over the T x (U+1) transducer
// lattice.  beta[t,u] includes the emissions made at (t,u), so
// beta[0,0] == alpha[T-1,U] + log P(blank | T-1, U) == log P(y|x).
struct LogLattice {
  Tensor alpha;      // [T x (U+1)]
  Tensor beta;       // [T x (U+1)]
  Tensor log_probs;  // [T x (U+1) x classes]
  double log_likelihood = 0.0;
};

LogLattice rnnt_lattice(const Tensor &logits, std::span<const int> targets, int blank);

// -log P(y|x) for logits [T x (U+1) x classes].
LossOutput rnnt_loss(const Tensor &logits, std::span<const int> targets, int blank);


// Standard CTC over logits [T x classes].  Rejects T shorter than
// ctc_min_frames(targets).
LossOutput ctc_loss(const Tensor &logits, std::span<const int> targets, int blank);
std::size_t ctc_min_frames(std::span<const int> targets);

// Mean over frames of -log softmax(logits[t])[targets[t]].
LossOutput frame_ce_loss(const Tensor &logits, std::span<const int> frame_targets);

// Mean CE over the masked cells of `label`; unmasked cells get exactly zero
// gradient.
LossOutput masked_ce_3d(const Tensor &logits, const LabelTensor &label);

// Next-token CE: row u of logits [(U+1) x classes] predicts targets[u]; the
// final row (context after the last token) is not scored.
LossOutput lm_ce_loss(const Tensor &logits, std::span<const int> targets);

// Tape versions: scalar nodes whose backward pushes the analytic gradient
// into `logits`.
Var rnnt_loss(Var logits, std::span<const int> targets, int blank);
Var ctc_loss(Var logits, std::span<const int> targets, int blank);
Var frame_ce_loss(Var logits, std::span<const int> frame_targets);
Var masked_ce_3d(Var logits, const LabelTensor &label);
Var lm_ce_loss(Var logits, std::span<const int> targets);

}  // namespace rnnt

#endif  // RNNT_LOSS_H_
