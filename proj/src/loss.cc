// rnnt-lab/src/loss.cc

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

#include "rnnt/loss.h"

#include <cmath>
#include <limits>
#include <vector>

namespace rnnt {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

// g_logits = g_logprobs - softmax * sum(g_logprobs), slice by slice.
void logprob_grad_to_logits(const Tensor &log_probs, Tensor &grad) {
  const std::size_t K = log_probs.shape().back();
  for (std::size_t off = 0; off < grad.size(); off += K) {
    double s = 0.0;
    for (std::size_t k = 0; k < K; ++k) s += grad[off + k];
    for (std::size_t k = 0; k < K; ++k)
      grad[off + k] -= std::exp(log_probs[off + k]) * s;
  }
}

void check_class(int id, std::size_t classes, const char *what) {
  if (id < 0 || static_cast<std::size_t>(id) >= classes)
    throw InvalidArgument(std::string(what) + " " + std::to_string(id) +
                          " outside [0, " + std::to_string(classes) + ")");
}

void check_rnnt_inputs(const Tensor &logits, std::span<const int> targets, int blank) {
  if (logits.rank() != 3)
    throw InvalidArgument("rnnt_loss: logits must be T x (U+1) x classes, got " +
                          shape_string(logits.shape()));
  if (logits.dim(1) != targets.size() + 1)
    throw InvalidArgument("rnnt_loss: logits have " + std::to_string(logits.dim(1)) +
                          " label rows for " + std::to_string(targets.size()) +
                          " targets");
  const std::size_t K = logits.dim(2);
  check_class(blank, K, "blank id");
  for (int y : targets) {
    check_class(y, K, "target");
    if (y == blank) throw InvalidArgument("rnnt_loss: blank appears in targets");
  }
}

}  // namespace

LogLattice rnnt_lattice(const Tensor &logits, std::span<const int> targets, int blank) {
  check_rnnt_inputs(logits, targets, blank);
  const std::size_t T = logits.dim(0), U = targets.size(), R = U + 1;
  LogLattice lat{Tensor({T, R}, kNegInf), Tensor({T, R}, kNegInf), log_softmax(logits), 0.0};
  const Tensor &lp = lat.log_probs;

  for (std::size_t t = 0; t < T; ++t)
    for (std::size_t u = 0; u < R; ++u) {
      if (t == 0 && u == 0) {
        lat.alpha.at(0, 0) = 0.0;
        continue;
      }
      double a = kNegInf;
      if (t > 0) a = lat.alpha.at(t - 1, u) + lp.at(t - 1, u, blank);
      if (u > 0) a = log_add(a, lat.alpha.at(t, u - 1) + lp.at(t, u - 1, targets[u - 1]));
      lat.alpha.at(t, u) = a;
    }

  for (std::size_t t = T; t-- > 0;)
    for (std::size_t u = R; u-- > 0;) {
      if (t == T - 1 && u == U) {
        lat.beta.at(t, u) = lp.at(t, u, blank);
        continue;
      }
      double b = kNegInf;
      if (t + 1 < T) b = lat.beta.at(t + 1, u) + lp.at(t, u, blank);
      if (u < U) b = log_add(b, lat.beta.at(t, u + 1) + lp.at(t, u, targets[u]));
      lat.beta.at(t, u) = b;
    }

  lat.log_likelihood = lat.alpha.at(T - 1, U) + lp.at(T - 1, U, blank);
  return lat;
}

LossOutput rnnt_loss(const Tensor &logits, std::span<const int> targets, int blank) {
  LogLattice lat = rnnt_lattice(logits, targets, blank);
  const std::size_t T = logits.dim(0), U = targets.size(), R = U + 1;
  const Tensor &lp = lat.log_probs;
  const double ll = lat.log_likelihood;

  // d(-log P)/d(log p) is minus the posterior of each transition.
  Tensor grad(logits.shape(), 0.0);
  for (std::size_t t = 0; t < T; ++t)
    for (std::size_t u = 0; u < R; ++u) {
      double a = lat.alpha.at(t, u);
      if (a == kNegInf) continue;
      double next_blank = kNegInf;
      if (t + 1 < T)
        next_blank = lat.beta.at(t + 1, u);
      else if (u == U)
        next_blank = 0.0;
      if (next_blank != kNegInf)
        grad.at(t, u, blank) = -std::exp(a + lp.at(t, u, blank) + next_blank - ll);
      if (u < U) {
        int y = targets[u];
        grad.at(t, u, y) = -std::exp(a + lp.at(t, u, y) + lat.beta.at(t, u + 1) - ll);
      }
    }
  logprob_grad_to_logits(lp, grad);
  return {-ll, std::move(grad)};
}

std::size_t ctc_min_frames(std::span<const int> targets) {
  std::size_t n = targets.size();
  for (std::size_t i = 1; i < targets.size(); ++i)
    if (targets[i] == targets[i - 1]) ++n;
  return n;
}

LossOutput ctc_loss(const Tensor &logits, std::span<const int> targets, int blank) {
  if (logits.rank() != 2)
    throw InvalidArgument("ctc_loss: logits must be T x classes, got " +
                          shape_string(logits.shape()));
  const std::size_t T = logits.dim(0), K = logits.dim(1);
  check_class(blank, K, "blank id");
  for (int y : targets) {
    check_class(y, K, "target");
    if (y == blank) throw InvalidArgument("ctc_loss: blank appears in targets");
  }
  const std::size_t need = ctc_min_frames(targets);
  if (T < need)
    throw InvalidArgument("ctc_loss: " + std::to_string(T) +
                          " frames cannot carry the targets; need at least " +
                          std::to_string(need));

  // Blank-interleaved label sequence: _ y1 _ y2 _ ... yU _
  const std::size_t S = 2 * targets.size() + 1;
  std::vector<int> ext(S, blank);
  for (std::size_t i = 0; i < targets.size(); ++i) ext[2 * i + 1] = targets[i];

  const Tensor lp = log_softmax(logits);
  Tensor alpha({T, S}, kNegInf), beta({T, S}, kNegInf);
  auto can_skip = [&](std::size_t s) {
    return s >= 2 && ext[s] != blank && ext[s] != ext[s - 2];
  };

  alpha.at(0, 0) = lp.at(0, ext[0]);
  if (S > 1) alpha.at(0, 1) = lp.at(0, ext[1]);
  for (std::size_t t = 1; t < T; ++t)
    for (std::size_t s = 0; s < S; ++s) {
      double a = alpha.at(t - 1, s);
      if (s >= 1) a = log_add(a, alpha.at(t - 1, s - 1));
      if (can_skip(s)) a = log_add(a, alpha.at(t - 1, s - 2));
      alpha.at(t, s) = a == kNegInf ? kNegInf : a + lp.at(t, ext[s]);
    }

  beta.at(T - 1, S - 1) = lp.at(T - 1, ext[S - 1]);
  if (S > 1) beta.at(T - 1, S - 2) = lp.at(T - 1, ext[S - 2]);
  for (std::size_t t = T - 1; t-- > 0;)
    for (std::size_t s = 0; s < S; ++s) {
      double b = beta.at(t + 1, s);
      if (s + 1 < S) b = log_add(b, beta.at(t + 1, s + 1));
      if (s + 2 < S && can_skip(s + 2)) b = log_add(b, beta.at(t + 1, s + 2));
      beta.at(t, s) = b == kNegInf ? kNegInf : b + lp.at(t, ext[s]);
    }

  double ll = alpha.at(T - 1, S - 1);
  if (S > 1) ll = log_add(ll, alpha.at(T - 1, S - 2));

  // alpha and beta both include the emission at t, so the state posterior
  // divides it out once.
  Tensor grad({T, K}, 0.0);
  for (std::size_t t = 0; t < T; ++t)
    for (std::size_t s = 0; s < S; ++s) {
      double ab = alpha.at(t, s) + beta.at(t, s);
      if (ab == kNegInf) continue;
      grad.at(t, ext[s]) -= std::exp(ab - lp.at(t, ext[s]) - ll);
    }
  logprob_grad_to_logits(lp, grad);
  return {-ll, std::move(grad)};
}

LossOutput frame_ce_loss(const Tensor &logits, std::span<const int> frame_targets) {
  if (logits.rank() != 2)
    throw InvalidArgument("frame_ce_loss: logits must be T x classes");
  const std::size_t T = logits.dim(0), K = logits.dim(1);
  if (frame_targets.size() != T)
    throw InvalidArgument("frame_ce_loss: " + std::to_string(frame_targets.size()) +
                          " frame targets for " + std::to_string(T) + " frames");
  const Tensor lp = log_softmax(logits);
  Tensor grad({T, K});
  double total = 0.0;
  const double inv = 1.0 / static_cast<double>(T);
  for (std::size_t t = 0; t < T; ++t) {
    check_class(frame_targets[t], K, "frame target");
    total -= lp.at(t, frame_targets[t]);
    for (std::size_t k = 0; k < K; ++k) grad.at(t, k) = std::exp(lp.at(t, k)) * inv;
    grad.at(t, frame_targets[t]) -= inv;
  }
  return {total * inv, std::move(grad)};
}

LossOutput masked_ce_3d(const Tensor &logits, const LabelTensor &label) {
  if (logits.rank() != 3 || logits.dim(0) != label.frames() ||
      logits.dim(1) != label.rows() || logits.dim(2) != label.classes())
    throw InvalidArgument("masked_ce_3d: logits " + shape_string(logits.shape()) +
                          " do not match label tensor [" +
                          std::to_string(label.frames()) + "x" +
                          std::to_string(label.rows()) + "x" +
                          std::to_string(label.classes()) + "]");
  const std::size_t cells = label.mask_count();
  if (cells == 0) throw InvalidArgument("masked_ce_3d: label mask is empty");
  const std::size_t T = label.frames(), R = label.rows(), K = label.classes();
  const double inv = 1.0 / static_cast<double>(cells);
  Tensor grad(logits.shape(), 0.0);
  double total = 0.0;
  std::vector<double> lp(K);
  for (std::size_t t = 0; t < T; ++t)
    for (std::size_t u = 0; u < R; ++u) {
      if (!label.masked(t, u)) continue;
      const double *z = &logits[(t * R + u) * K];
      double m = z[0];
      for (std::size_t k = 1; k < K; ++k) m = std::max(m, z[k]);
      double s = 0.0;
      for (std::size_t k = 0; k < K; ++k) s += std::exp(z[k] - m);
      double lse = m + std::log(s);
      int y = label.target(t, u);
      total -= z[y] - lse;
      for (std::size_t k = 0; k < K; ++k) grad.at(t, u, k) = std::exp(z[k] - lse) * inv;
      grad.at(t, u, y) -= inv;
    }
  return {total * inv, std::move(grad)};
}

LossOutput lm_ce_loss(const Tensor &logits, std::span<const int> targets) {
  if (targets.empty()) throw InvalidArgument("lm_ce_loss: needs at least one token");
  if (logits.rank() != 2 || logits.dim(0) != targets.size() + 1)
    throw InvalidArgument("lm_ce_loss: logits " + shape_string(logits.shape()) +
                          " do not hold U+1 = " + std::to_string(targets.size() + 1) +
                          " rows");
  const std::size_t U = targets.size(), K = logits.dim(1);
  const Tensor lp = log_softmax(logits);
  Tensor grad(logits.shape(), 0.0);
  const double inv = 1.0 / static_cast<double>(U);
  double total = 0.0;
  for (std::size_t u = 0; u < U; ++u) {
    check_class(targets[u], K, "LM target");
    total -= lp.at(u, targets[u]);
    for (std::size_t k = 0; k < K; ++k) grad.at(u, k) = std::exp(lp.at(u, k)) * inv;
    grad.at(u, targets[u]) -= inv;
  }
  return {total * inv, std::move(grad)};
}

Var rnnt_loss(Var logits, std::span<const int> targets, int blank) {
  LossOutput out = rnnt_loss(logits.value(), targets, blank);
  return attach_loss(logits, out.value, out.grad_logits);
}

Var ctc_loss(Var logits, std::span<const int> targets, int blank) {
  LossOutput out = ctc_loss(logits.value(), targets, blank);
  return attach_loss(logits, out.value, out.grad_logits);
}

Var frame_ce_loss(Var logits, std::span<const int> frame_targets) {
  LossOutput out = frame_ce_loss(logits.value(), frame_targets);
  return attach_loss(logits, out.value, out.grad_logits);
}

Var masked_ce_3d(Var logits, const LabelTensor &label) {
  LossOutput out = masked_ce_3d(logits.value(), label);
  return attach_loss(logits, out.value, out.grad_logits);
}

Var lm_ce_loss(Var logits, std::span<const int> targets) {
  LossOutput out = lm_ce_loss(logits.value(), targets);
  return attach_loss(logits, out.value, out.grad_logits);
}

}  // namespace rnnt
