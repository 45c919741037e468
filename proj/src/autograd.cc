// rnnt-lab/src/autograd.cc

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

#include "rnnt/autograd.h"

#include <algorithm>
#include <cmath>

namespace rnnt {

const Tensor &Var::value() const { return tape->value(id); }

Var Tape::param(Tensor &param) {
  Tensor copy(param.shape(),
              std::vector<double>(param.data().begin(), param.data().end()));
  nodes_.push_back(Node{std::move(copy), {}, &param, nullptr});
  return Var{this, nodes_.size() - 1};
}

Var Tape::constant(Tensor value) {
  nodes_.push_back(Node{std::move(value), {}, nullptr, nullptr});
  return Var{this, nodes_.size() - 1};
}

Var Tape::record(Tensor value, BackwardFn backward) {
  nodes_.push_back(Node{std::move(value), {}, nullptr, std::move(backward)});
  return Var{this, nodes_.size() - 1};
}

std::span<double> Tape::grad(std::size_t id) {
  Node &n = nodes_[id];
  if (n.grad.empty()) n.grad.assign(n.value.size(), 0.0);
  return n.grad;
}

void Tape::backward(Var output) {
  if (output.tape != this) throw InvalidArgument("variable from another tape");
  if (value(output.id).size() != 1)
    throw InvalidArgument("backward() needs a scalar output, got " +
                          shape_string(value(output.id).shape()));
  for (Node &n : nodes_) n.grad.clear();
  grad(output.id)[0] = 1.0;
  for (std::size_t i = output.id + 1; i-- > 0;) {
    Node &n = nodes_[i];
    if (n.grad.empty()) continue;
    if (n.backward) {
      // The closure may allocate other nodes' gradients, which never
      // reallocates nodes_, so the span stays valid.
      n.backward(*this, n.grad);
    } else if (n.param) {
      auto g = n.param->grad();
      for (std::size_t k = 0; k < g.size(); ++k) g[k] += n.grad[k];
    }
  }
}

namespace {

Tape &same_tape(Var a, Var b) {
  if (a.tape == nullptr || a.tape != b.tape)
    throw InvalidArgument("variables belong to different tapes");
  return *a.tape;
}

void require_same_shape(const Tensor &a, const Tensor &b, const char *op) {
  if (a.shape() != b.shape())
    throw InvalidArgument(std::string(op) + ": shape mismatch " +
                          shape_string(a.shape()) + " vs " +
                          shape_string(b.shape()));
}

std::size_t rows_of(const Tensor &t) { return t.dim(0); }
std::size_t cols_of(const Tensor &t) { return t.size() / t.dim(0); }

}  // namespace

Var matmul(Var a, Var b) {
  Tape &tape = same_tape(a, b);
  const Tensor &av = a.value();
  const Tensor &bv = b.value();
  if (av.rank() != 2 || bv.rank() != 2 || av.dim(1) != bv.dim(0))
    throw InvalidArgument("matmul: incompatible shapes " +
                          shape_string(av.shape()) + " and " +
                          shape_string(bv.shape()));
  std::size_t m = av.dim(0), k = av.dim(1), n = bv.dim(1);
  Tensor out({m, n});
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t p = 0; p < k; ++p) {
      double x = av.at(i, p);
      if (x == 0.0) continue;
      const double *brow = &bv[p * n];
      double *orow = &out[i * n];
      for (std::size_t j = 0; j < n; ++j) orow[j] += x * brow[j];
    }
  std::size_t ia = a.id, ib = b.id;
  return tape.record(std::move(out), [ia, ib, m, k, n](Tape &t,
                                                       std::span<const double> g) {
    const Tensor &av = t.value(ia);
    const Tensor &bv = t.value(ib);
    // dA = dC * B^T
    auto ga = t.grad(ia);
    for (std::size_t i = 0; i < m; ++i)
      for (std::size_t p = 0; p < k; ++p) {
        double s = 0.0;
        const double *brow = &bv[p * n];
        const double *grow = &g[i * n];
        for (std::size_t j = 0; j < n; ++j) s += grow[j] * brow[j];
        ga[i * k + p] += s;
      }
    // dB = A^T * dC
    auto gb = t.grad(ib);
    for (std::size_t i = 0; i < m; ++i)
      for (std::size_t p = 0; p < k; ++p) {
        double x = av.at(i, p);
        if (x == 0.0) continue;
        const double *grow = &g[i * n];
        double *gbrow = &gb[p * n];
        for (std::size_t j = 0; j < n; ++j) gbrow[j] += x * grow[j];
      }
  });
}

Var add(Var a, Var b) {
  Tape &tape = same_tape(a, b);
  require_same_shape(a.value(), b.value(), "add");
  Tensor out = a.value();
  auto bd = b.value().data();
  for (std::size_t i = 0; i < out.size(); ++i) out[i] += bd[i];
  std::size_t ia = a.id, ib = b.id;
  return tape.record(std::move(out), [ia, ib](Tape &t, std::span<const double> g) {
    auto ga = t.grad(ia);
    for (std::size_t i = 0; i < g.size(); ++i) ga[i] += g[i];
    auto gb = t.grad(ib);
    for (std::size_t i = 0; i < g.size(); ++i) gb[i] += g[i];
  });
}

Var mul(Var a, Var b) {
  Tape &tape = same_tape(a, b);
  require_same_shape(a.value(), b.value(), "mul");
  Tensor out = a.value();
  auto bd = b.value().data();
  for (std::size_t i = 0; i < out.size(); ++i) out[i] *= bd[i];
  std::size_t ia = a.id, ib = b.id;
  return tape.record(std::move(out), [ia, ib](Tape &t, std::span<const double> g) {
    const Tensor &av = t.value(ia);
    const Tensor &bv = t.value(ib);
    auto ga = t.grad(ia);
    for (std::size_t i = 0; i < g.size(); ++i) ga[i] += g[i] * bv[i];
    auto gb = t.grad(ib);
    for (std::size_t i = 0; i < g.size(); ++i) gb[i] += g[i] * av[i];
  });
}

Var scale(Var a, double factor) {
  Tensor out = a.value();
  for (double &v : out.data()) v *= factor;
  std::size_t ia = a.id;
  return a.tape->record(std::move(out),
                        [ia, factor](Tape &t, std::span<const double> g) {
                          auto ga = t.grad(ia);
                          for (std::size_t i = 0; i < g.size(); ++i)
                            ga[i] += g[i] * factor;
                        });
}

Var sigmoid(Var a) {
  Tensor out = a.value();
  for (double &v : out.data()) v = 1.0 / (1.0 + std::exp(-v));
  std::size_t ia = a.id;
  std::size_t self = a.tape->size();
  return a.tape->record(std::move(out),
                        [ia, self](Tape &t, std::span<const double> g) {
                          const Tensor &y = t.value(self);
                          auto ga = t.grad(ia);
                          for (std::size_t i = 0; i < g.size(); ++i)
                            ga[i] += g[i] * y[i] * (1.0 - y[i]);
                        });
}

Var tanh(Var a) {
  Tensor out = a.value();
  for (double &v : out.data()) v = std::tanh(v);
  std::size_t ia = a.id;
  std::size_t self = a.tape->size();
  return a.tape->record(std::move(out),
                        [ia, self](Tape &t, std::span<const double> g) {
                          const Tensor &y = t.value(self);
                          auto ga = t.grad(ia);
                          for (std::size_t i = 0; i < g.size(); ++i)
                            ga[i] += g[i] * (1.0 - y[i] * y[i]);
                        });
}

Var add_row_bias(Var a, Var bias) {
  Tape &tape = same_tape(a, bias);
  const Tensor &av = a.value();
  const Tensor &bv = bias.value();
  std::size_t n = cols_of(av);
  if (bv.size() != n)
    throw InvalidArgument("add_row_bias: bias " + shape_string(bv.shape()) +
                          " does not match rows of " +
                          shape_string(av.shape()));
  Tensor out = av;
  for (std::size_t i = 0; i < out.size(); ++i) out[i] += bv[i % n];
  std::size_t ia = a.id, ib = bias.id;
  return tape.record(std::move(out), [ia, ib, n](Tape &t, std::span<const double> g) {
    auto ga = t.grad(ia);
    auto gb = t.grad(ib);
    for (std::size_t i = 0; i < g.size(); ++i) {
      ga[i] += g[i];
      gb[i % n] += g[i];
    }
  });
}

Var gather_rows(Var table, std::span<const int> ids) {
  const Tensor &tv = table.value();
  std::size_t vocab = rows_of(tv), n = cols_of(tv);
  if (ids.empty()) throw InvalidArgument("gather_rows: no ids");
  for (int id : ids)
    if (id < -1 || id >= static_cast<int>(vocab))
      throw InvalidArgument("gather_rows: id " + std::to_string(id) +
                            " outside table of " + std::to_string(vocab) +
                            " rows");
  Tensor out({ids.size(), n});
  for (std::size_t r = 0; r < ids.size(); ++r)
    if (ids[r] >= 0) std::ranges::copy(tv.row(ids[r]), out.row(r).begin());
  std::vector<int> kept(ids.begin(), ids.end());
  std::size_t it = table.id;
  return table.tape->record(
      std::move(out), [it, n, kept = std::move(kept)](Tape &t,
                                                      std::span<const double> g) {
        auto gt = t.grad(it);
        for (std::size_t r = 0; r < kept.size(); ++r) {
          if (kept[r] < 0) continue;
          for (std::size_t j = 0; j < n; ++j) gt[kept[r] * n + j] += g[r * n + j];
        }
      });
}

Var pairwise_add(Var a, Var b) {
  Tape &tape = same_tape(a, b);
  const Tensor &av = a.value();
  const Tensor &bv = b.value();
  if (av.rank() != 2 || bv.rank() != 2 || av.dim(1) != bv.dim(1))
    throw InvalidArgument("pairwise_add: width mismatch " +
                          shape_string(av.shape()) + " vs " +
                          shape_string(bv.shape()));
  std::size_t ta = av.dim(0), rb = bv.dim(0), p = av.dim(1);
  Tensor out({ta * rb, p});
  for (std::size_t i = 0; i < ta; ++i)
    for (std::size_t j = 0; j < rb; ++j) {
      double *o = &out[(i * rb + j) * p];
      const double *x = &av[i * p];
      const double *y = &bv[j * p];
      for (std::size_t c = 0; c < p; ++c) o[c] = x[c] + y[c];
    }
  std::size_t ia = a.id, ib = b.id;
  return tape.record(std::move(out), [ia, ib, ta, rb, p](Tape &t,
                                                         std::span<const double> g) {
    auto ga = t.grad(ia);
    auto gb = t.grad(ib);
    for (std::size_t i = 0; i < ta; ++i)
      for (std::size_t j = 0; j < rb; ++j) {
        const double *gr = &g[(i * rb + j) * p];
        for (std::size_t c = 0; c < p; ++c) {
          ga[i * p + c] += gr[c];
          gb[j * p + c] += gr[c];
        }
      }
  });
}

Var concat_rows(std::span<const Var> parts) {
  if (parts.empty()) throw InvalidArgument("concat_rows: nothing to concatenate");
  Tape &tape = *parts[0].tape;
  std::size_t n = cols_of(parts[0].value());
  std::size_t rows = 0;
  std::vector<std::size_t> ids, offsets;
  for (Var v : parts) {
    if (v.tape != &tape) throw InvalidArgument("variables belong to different tapes");
    if (cols_of(v.value()) != n)
      throw InvalidArgument("concat_rows: width mismatch");
    ids.push_back(v.id);
    offsets.push_back(rows * n);
    rows += rows_of(v.value());
  }
  Tensor out({rows, n});
  for (std::size_t k = 0; k < parts.size(); ++k)
    std::ranges::copy(parts[k].value().data(), out.data().begin() + offsets[k]);
  return tape.record(std::move(out), [ids, offsets](Tape &t,
                                                    std::span<const double> g) {
    for (std::size_t k = 0; k < ids.size(); ++k) {
      auto gk = t.grad(ids[k]);
      for (std::size_t i = 0; i < gk.size(); ++i) gk[i] += g[offsets[k] + i];
    }
  });
}

Var reshape(Var a, Shape shape) {
  Tensor out = a.value().reshaped(std::move(shape));
  std::size_t ia = a.id;
  return a.tape->record(std::move(out), [ia](Tape &t, std::span<const double> g) {
    auto ga = t.grad(ia);
    for (std::size_t i = 0; i < g.size(); ++i) ga[i] += g[i];
  });
}

Var log_softmax(Var a) {
  Tensor out = log_softmax(a.value());
  std::size_t k = out.shape().back();
  std::size_t ia = a.id;
  std::size_t self = a.tape->size();
  return a.tape->record(std::move(out), [ia, self, k](Tape &t,
                                                      std::span<const double> g) {
    const Tensor &y = t.value(self);
    auto ga = t.grad(ia);
    for (std::size_t off = 0; off < g.size(); off += k) {
      double gs = 0.0;
      for (std::size_t j = 0; j < k; ++j) gs += g[off + j];
      for (std::size_t j = 0; j < k; ++j)
        ga[off + j] += g[off + j] - std::exp(y[off + j]) * gs;
    }
  });
}

Var sum(Var a) {
  double s = 0.0;
  for (double v : a.value().data()) s += v;
  std::size_t ia = a.id;
  return a.tape->record(Tensor({1}, s), [ia](Tape &t, std::span<const double> g) {
    auto ga = t.grad(ia);
    for (double &v : ga) v += g[0];
  });
}

Var attach_loss(Var input, double value, const Tensor &grad_input) {
  if (grad_input.size() != input.value().size())
    throw InvalidArgument("attach_loss: gradient " +
                          shape_string(grad_input.shape()) +
                          " does not match input " +
                          shape_string(input.value().shape()));
  std::size_t ii = input.id;
  return input.tape->record(
      Tensor({1}, value), [ii, grad_input](Tape &t, std::span<const double> g) {
        auto gi = t.grad(ii);
        for (std::size_t i = 0; i < gi.size(); ++i) gi[i] += g[0] * grad_input[i];
      });
}

double grad_check(const std::function<double()> &loss,
                  std::span<Tensor *const> params, double eps) {
  for (Tensor *p : params) p->zero_grad();
  double base = loss();
  if (!std::isfinite(base)) throw InvalidArgument("grad_check: loss is not finite");
  std::vector<std::vector<double>> analytic;
  for (Tensor *p : params) {
    auto g = p->grad();
    analytic.emplace_back(g.begin(), g.end());
  }
  double worst = 0.0;
  for (std::size_t k = 0; k < params.size(); ++k) {
    Tensor &p = *params[k];
    for (std::size_t i = 0; i < p.size(); ++i) {
      double saved = p[i];
      p[i] = saved + eps;
      double up = loss();
      p[i] = saved - eps;
      double down = loss();
      p[i] = saved;
      if (!std::isfinite(up) || !std::isfinite(down))
        throw InvalidArgument("grad_check: loss is not finite under perturbation");
      double numeric = (up - down) / (2.0 * eps);
      double a = analytic[k][i];
      double denom = std::max({std::abs(a), std::abs(numeric), 1e-8});
      worst = std::max(worst, std::abs(a - numeric) / denom);
    }
  }
  for (Tensor *p : params) p->zero_grad();
  return worst;
}

}  // namespace rnnt
