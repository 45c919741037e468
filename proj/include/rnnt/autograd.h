// rnnt-lab/include/rnnt/autograd.h

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

#ifndef RNNT_AUTOGRAD_H_
#define RNNT_AUTOGRAD_H_

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

#include "rnnt/tensor.h"

namespace rnnt {

class Tape;

// Handle to a value recorded on a Tape.
struct Var {
  Tape *tape = nullptr;
  std::size_t id = 0;

  const Tensor &value() const;
  const Shape &shape() const { return value().shape(); }
};

// Explicit record of primitive operations for reverse-mode differentiation.
// Nodes are appended in evaluation order, so every node's inputs precede it
// and backward() simply walks the list in reverse.
class Tape {
 public:
  // Called once during backward().  `out_grad` is the gradient flowing into
  // the node; the function adds its contribution to the inputs' gradients
  // through Tape::grad().
  using BackwardFn = std::function<void(Tape &, std::span<const double> out_grad)>;

  Tape() = default;
  Tape(const Tape &) = delete;
  Tape &operator=(const Tape &) = delete;

  // Leaf bound to a parameter; backward() adds into param.grad().  The same
  // parameter may be bound more than once.
  Var param(Tensor &param);
  Var constant(Tensor value);

  Var record(Tensor value, BackwardFn backward);

  const Tensor &value(std::size_t id) const { return nodes_[id].value; }
  // Gradient buffer of node `id`, allocated lazily.
  std::span<double> grad(std::size_t id);
  bool has_grad(std::size_t id) const { return !nodes_[id].grad.empty(); }

  // Seeds d(output)/d(output) = 1; output must hold a single value.
  void backward(Var output);

  std::size_t size() const { return nodes_.size(); }

 private:
  struct Node {
    Tensor value;
    std::vector<double> grad;
    Tensor *param = nullptr;
    BackwardFn backward;
  };
  std::vector<Node> nodes_;
};

Var matmul(Var a, Var b);
Var add(Var a, Var b);
Var mul(Var a, Var b);
Var scale(Var a, double factor);
Var sigmoid(Var a);
Var tanh(Var a);
// a[m x n] + bias[n] broadcast over rows.
Var add_row_bias(Var a, Var bias);
// Rows `ids` of table[V x n]; id -1 selects an all-zero row.
Var gather_rows(Var table, std::span<const int> ids);
// out[i * R + j] = a[i] + b[j] for a[T x P], b[R x P]; result [(T*R) x P].
Var pairwise_add(Var a, Var b);
Var concat_rows(std::span<const Var> parts);
Var reshape(Var a, Shape shape);
Var log_softmax(Var a);
Var sum(Var a);
// Scalar node with a precomputed gradient w.r.t. `input`, used to splice the
// hand-written loss functions into the tape.
Var attach_loss(Var input, double value, const Tensor &grad_input);

// Max over all coordinates of |analytic - numeric| / max(|analytic|,
// |numeric|, 1e-8), numeric being the central difference with step eps.
// `loss` must evaluate the scalar and accumulate its analytic gradient into
// the parameters' grad buffers; grad_check zeroes them first.
double grad_check(const std::function<double()> &loss,
                  std::span<Tensor *const> params, double eps);

}  // namespace rnnt

#endif  // RNNT_AUTOGRAD_H_
