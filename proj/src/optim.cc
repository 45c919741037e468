// rnnt-lab/src/optim.cc

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

#include "rnnt/optim.h"

#include <cmath>

namespace rnnt {

double uniform01(Rng &rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

std::size_t uniform_index(Rng &rng, std::size_t n) {
  if (n == 0) throw InvalidArgument("uniform_index over an empty range");
  // Rejection sampling keeps the draw exactly uniform.
  const std::uint64_t limit = Rng::max() - Rng::max() % n;
  std::uint64_t r;
  do {
    r = rng();
  } while (r >= limit);
  return static_cast<std::size_t>(r % n);
}

std::size_t uniform_range(Rng &rng, std::size_t lo, std::size_t hi) {
  if (hi < lo) throw InvalidArgument("uniform_range with hi < lo");
  return lo + uniform_index(rng, hi - lo + 1);
}

double standard_normal(Rng &rng) {
  // Box-Muller; 1 - u keeps the log argument in (0, 1].
  double u1 = 1.0 - uniform01(rng);
  double u2 = uniform01(rng);
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
}

void xavier_uniform(Tensor &t, std::size_t fan_in, std::size_t fan_out, Rng &rng) {
  double s = std::sqrt(6.0 / static_cast<double>(fan_in + fan_out));
  for (double &v : t.data()) v = (2.0 * uniform01(rng) - 1.0) * s;
}

double global_grad_norm(std::span<Tensor *const> params) {
  double sq = 0.0;
  for (const Tensor *p : params)
    for (double g : p->grad()) sq += g * g;
  return std::sqrt(sq);
}

Adam::Adam(std::vector<Tensor *> params, AdamOptions options)
    : params_(std::move(params)), options_(options) {
  for (Tensor *p : params_) {
    m_.emplace_back(p->size(), 0.0);
    v_.emplace_back(p->size(), 0.0);
    p->grad();
  }
}

void Adam::step() {
  double factor = 1.0;
  if (options_.clip_norm > 0.0) {
    double norm = global_grad_norm(params_);
    if (norm > options_.clip_norm) factor = options_.clip_norm / norm;
  }
  ++steps_;
  double bc1 = 1.0 - std::pow(options_.beta1, static_cast<double>(steps_));
  double bc2 = 1.0 - std::pow(options_.beta2, static_cast<double>(steps_));
  for (std::size_t k = 0; k < params_.size(); ++k) {
    Tensor &p = *params_[k];
    auto g = p.grad();
    auto &m = m_[k];
    auto &v = v_[k];
    for (std::size_t i = 0; i < p.size(); ++i) {
      double gi = g[i] * factor;
      m[i] = options_.beta1 * m[i] + (1.0 - options_.beta1) * gi;
      v[i] = options_.beta2 * v[i] + (1.0 - options_.beta2) * gi * gi;
      double mhat = m[i] / bc1;
      double vhat = v[i] / bc2;
      p[i] -= options_.learning_rate * mhat / (std::sqrt(vhat) + options_.epsilon);
    }
  }
  zero_grad();
}

void Adam::zero_grad() {
  for (Tensor *p : params_) p->zero_grad();
}

}  // namespace rnnt
