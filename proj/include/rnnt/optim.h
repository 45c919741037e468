// rnnt-lab/include/rnnt/optim.h

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

#ifndef RNNT_OPTIM_H_
#define RNNT_OPTIM_H_

#include <cstdint>
#include <random>
#include <span>
#include <vector>

#include "rnnt/tensor.h"

namespace rnnt {

using Rng = std::mt19937_64;

// Draws taken straight from the engine bits, so sequences are identical
// across standard libraries (the std distributions make no such promise).
double uniform01(Rng &rng);                                // [0, 1)
std::size_t uniform_index(Rng &rng, std::size_t n);        // [0, n)
std::size_t uniform_range(Rng &rng, std::size_t lo, std::size_t hi);  // [lo, hi]
double standard_normal(Rng &rng);

// Uniform in [-s, s] with s = sqrt(6 / (fan_in + fan_out)).
void xavier_uniform(Tensor &t, std::size_t fan_in, std::size_t fan_out, Rng &rng);

double global_grad_norm(std::span<Tensor *const> params);

struct AdamOptions {
  double learning_rate = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
  double clip_norm = 5.0;  // <= 0 disables clipping
};

// Adam over a fixed parameter list.  step() clips by global norm, applies
// the update and zeroes the gradients.
class Adam {
 public:
  Adam(std::vector<Tensor *> params, AdamOptions options);

  void step();
  void zero_grad();
  std::int64_t steps() const { return steps_; }

 private:
  std::vector<Tensor *> params_;
  AdamOptions options_;
  std::vector<std::vector<double>> m_, v_;
  std::int64_t steps_ = 0;
};

}  // namespace rnnt

#endif  // RNNT_OPTIM_H_
