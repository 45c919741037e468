// rnnt-lab/src/lstm.cc

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

#include "rnnt/lstm.h"

#include <cmath>
#include <memory>

namespace rnnt {

namespace {

constexpr double kLayerNormEps = 1e-5;

double sigm(double x) { return 1.0 / (1.0 + std::exp(-x)); }

// Everything the backward pass needs from one time step.
struct StepCache {
  std::vector<double> gates;  // activated [i | f | g | o]
  std::vector<double> c;
  std::vector<double> tanh_c;
  std::vector<double> ahat;  // normalized pre-activations, layer norm only
  double inv_sigma = 0.0;
};

// Shared by training and streaming inference so both produce bit-identical
// values.
void cell_forward(const LstmLayer &L, std::span<const double> x,
                  std::span<const double> h_prev, std::span<const double> c_prev,
                  StepCache &cache, std::span<double> h_out) {
  const std::size_t H = L.hidden_size, G = 4 * H;
  std::vector<double> pre(L.bias.data().begin(), L.bias.data().end());
  for (std::size_t p = 0; p < L.input_size; ++p) {
    double v = x[p];
    if (v == 0.0) continue;
    const double *w = &L.w_input[p * G];
    for (std::size_t j = 0; j < G; ++j) pre[j] += v * w[j];
  }
  for (std::size_t p = 0; p < H; ++p) {
    double v = h_prev[p];
    if (v == 0.0) continue;
    const double *w = &L.w_recurrent[p * G];
    for (std::size_t j = 0; j < G; ++j) pre[j] += v * w[j];
  }
  if (L.layer_norm) {
    double mu = 0.0;
    for (double v : pre) mu += v;
    mu /= static_cast<double>(G);
    double var = 0.0;
    for (double v : pre) var += (v - mu) * (v - mu);
    var /= static_cast<double>(G);
    cache.inv_sigma = 1.0 / std::sqrt(var + kLayerNormEps);
    cache.ahat.resize(G);
    for (std::size_t j = 0; j < G; ++j) {
      cache.ahat[j] = (pre[j] - mu) * cache.inv_sigma;
      pre[j] = cache.ahat[j] * L.ln_gain[j] + L.ln_shift[j];
    }
  }
  cache.gates.resize(G);
  cache.c.resize(H);
  cache.tanh_c.resize(H);
  for (std::size_t j = 0; j < H; ++j) {
    double i = sigm(pre[j]);
    double f = sigm(pre[H + j]);
    double g = std::tanh(pre[2 * H + j]);
    double o = sigm(pre[3 * H + j]);
    cache.gates[j] = i;
    cache.gates[H + j] = f;
    cache.gates[2 * H + j] = g;
    cache.gates[3 * H + j] = o;
    cache.c[j] = f * c_prev[j] + i * g;
    cache.tanh_c[j] = std::tanh(cache.c[j]);
    h_out[j] = o * cache.tanh_c[j];
  }
}

}  // namespace

LstmLayer::LstmLayer(std::size_t input, std::size_t hidden, bool layer_norm)
    : input_size(input),
      hidden_size(hidden),
      layer_norm(layer_norm),
      w_input({input, 4 * hidden}),
      w_recurrent({hidden, 4 * hidden}),
      bias({4 * hidden}) {
  if (layer_norm) {
    ln_gain = Tensor({4 * hidden}, 1.0);
    ln_shift = Tensor({4 * hidden}, 0.0);
  }
}

void LstmLayer::init(Rng &rng) {
  xavier_uniform(w_input, input_size, 4 * hidden_size, rng);
  xavier_uniform(w_recurrent, hidden_size, 4 * hidden_size, rng);
  for (double &v : bias.data()) v = 0.0;
  if (layer_norm) {
    for (double &v : ln_gain.data()) v = 1.0;
    for (double &v : ln_shift.data()) v = 0.0;
  }
}

void LstmLayer::collect(const std::string &prefix, NamedParams &out) {
  out.emplace_back(prefix + ".w_input", &w_input);
  out.emplace_back(prefix + ".w_recurrent", &w_recurrent);
  out.emplace_back(prefix + ".bias", &bias);
  if (layer_norm) {
    out.emplace_back(prefix + ".ln_gain", &ln_gain);
    out.emplace_back(prefix + ".ln_shift", &ln_shift);
  }
}

LstmStack::LstmStack(std::size_t input, std::size_t hidden, std::size_t layers,
                     bool layer_norm) {
  if (input == 0 || hidden == 0 || layers == 0)
    throw InvalidArgument("LSTM extents must be positive");
  for (std::size_t l = 0; l < layers; ++l)
    layers_.emplace_back(l == 0 ? input : hidden, hidden, layer_norm);
}

Var LstmStack::forward(Tape &tape, Var x) {
  Var h = x;
  for (LstmLayer &layer : layers_) h = lstm_layer(tape, h, layer);
  return h;
}

LstmState LstmStack::initial_state() const {
  LstmState s;
  for (const LstmLayer &l : layers_) {
    s.h.emplace_back(l.hidden_size, 0.0);
    s.c.emplace_back(l.hidden_size, 0.0);
  }
  return s;
}

std::span<const double> LstmStack::step(LstmState &state,
                                        std::span<const double> input) const {
  if (input.size() != input_size())
    throw InvalidArgument("LSTM step: input width " + std::to_string(input.size()) +
                          " != " + std::to_string(input_size()));
  StepCache cache;
  std::span<const double> in = input;
  for (std::size_t l = 0; l < layers_.size(); ++l) {
    std::vector<double> h(layers_[l].hidden_size);
    cell_forward(layers_[l], in, state.h[l], state.c[l], cache, h);
    state.h[l] = std::move(h);
    state.c[l] = cache.c;
    in = state.h[l];
  }
  return state.h.back();
}

void LstmStack::init(Rng &rng) {
  for (LstmLayer &l : layers_) l.init(rng);
}

void LstmStack::collect(const std::string &prefix, NamedParams &out) {
  for (std::size_t l = 0; l < layers_.size(); ++l)
    layers_[l].collect(prefix + ".l" + std::to_string(l), out);
}

Var lstm_layer(Tape &tape, Var x, LstmLayer &layer) {
  const Tensor &xv = x.value();
  if (xv.rank() != 2 || xv.dim(1) != layer.input_size)
    throw InvalidArgument("LSTM input " + shape_string(xv.shape()) +
                          " does not match layer input width " +
                          std::to_string(layer.input_size));
  const std::size_t T = xv.dim(0), H = layer.hidden_size, G = 4 * H;
  const std::size_t In = layer.input_size;

  Var w_in = tape.param(layer.w_input);
  Var w_rec = tape.param(layer.w_recurrent);
  Var b = tape.param(layer.bias);
  Var gain{}, shift{};
  if (layer.layer_norm) {
    gain = tape.param(layer.ln_gain);
    shift = tape.param(layer.ln_shift);
  }

  auto caches = std::make_shared<std::vector<StepCache>>(T);
  Tensor out({T, H});
  std::vector<double> zeros(H, 0.0);
  for (std::size_t t = 0; t < T; ++t) {
    std::span<const double> h_prev = t ? out.row(t - 1) : std::span<const double>(zeros);
    std::span<const double> c_prev =
        t ? std::span<const double>((*caches)[t - 1].c) : std::span<const double>(zeros);
    cell_forward(layer, tape.value(x.id).row(t), h_prev, c_prev, (*caches)[t], out.row(t));
  }

  const std::size_t ix = x.id, iw = w_in.id, ir = w_rec.id, ib = b.id;
  const std::size_t ig = gain.id, is = shift.id;
  const bool ln = layer.layer_norm;
  const std::size_t self = tape.size();
  return tape.record(std::move(out), [=](Tape &tp, std::span<const double> g) {
    const Tensor &xv = tp.value(ix);
    const Tensor &hv = tp.value(self);
    const Tensor &Wi = tp.value(iw);
    const Tensor &Wr = tp.value(ir);
    auto gx = tp.grad(ix);
    auto gWi = tp.grad(iw);
    auto gWr = tp.grad(ir);
    auto gb = tp.grad(ib);
    std::span<double> ggain, gshift;
    const Tensor *gainv = nullptr;
    if (ln) {
      ggain = tp.grad(ig);
      gshift = tp.grad(is);
      gainv = &tp.value(ig);
    }
    std::vector<double> dh_next(H, 0.0), dc_next(H, 0.0);
    std::vector<double> da(G), dpre(G), dh(H);
    for (std::size_t t = T; t-- > 0;) {
      const StepCache &sc = (*caches)[t];
      for (std::size_t j = 0; j < H; ++j) dh[j] = g[t * H + j] + dh_next[j];
      for (std::size_t j = 0; j < H; ++j) {
        double i = sc.gates[j], f = sc.gates[H + j];
        double gg = sc.gates[2 * H + j], o = sc.gates[3 * H + j];
        double c_prev = t ? (*caches)[t - 1].c[j] : 0.0;
        double tc = sc.tanh_c[j];
        double dc = dh[j] * o * (1.0 - tc * tc) + dc_next[j];
        da[j] = dc * gg * i * (1.0 - i);
        da[H + j] = dc * c_prev * f * (1.0 - f);
        da[2 * H + j] = dc * i * (1.0 - gg * gg);
        da[3 * H + j] = dh[j] * tc * o * (1.0 - o);
        dc_next[j] = dc * f;
      }
      if (ln) {
        // d(pre) from d(gain * ahat + shift).
        double mean_d = 0.0, mean_dx = 0.0;
        for (std::size_t j = 0; j < G; ++j) {
          ggain[j] += da[j] * sc.ahat[j];
          gshift[j] += da[j];
          double d = da[j] * (*gainv)[j];
          dpre[j] = d;
          mean_d += d;
          mean_dx += d * sc.ahat[j];
        }
        mean_d /= static_cast<double>(G);
        mean_dx /= static_cast<double>(G);
        for (std::size_t j = 0; j < G; ++j)
          dpre[j] = sc.inv_sigma * (dpre[j] - mean_d - sc.ahat[j] * mean_dx);
      } else {
        dpre = da;
      }
      for (std::size_t j = 0; j < G; ++j) gb[j] += dpre[j];
      for (std::size_t p = 0; p < In; ++p) {
        double xp = xv[t * In + p];
        const double *w = &Wi[p * G];
        double *gw = &gWi[p * G];
        double s = 0.0;
        for (std::size_t j = 0; j < G; ++j) {
          gw[j] += xp * dpre[j];
          s += w[j] * dpre[j];
        }
        gx[t * In + p] += s;
      }
      for (std::size_t p = 0; p < H; ++p) {
        double hp = t ? hv[(t - 1) * H + p] : 0.0;
        const double *w = &Wr[p * G];
        double *gw = &gWr[p * G];
        double s = 0.0;
        for (std::size_t j = 0; j < G; ++j) {
          gw[j] += hp * dpre[j];
          s += w[j] * dpre[j];
        }
        dh_next[p] = s;
      }
    }
  });
}

}  // namespace rnnt
