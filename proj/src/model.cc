// rnnt-lab/src/model.cc

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

#include "rnnt/model.h"

#include <algorithm>
#include <cmath>

namespace rnnt {

void ModelConfig::validate() const {
  if (input_dim == 0 || stack_factor == 0 || stride == 0 || encoder_layers == 0 ||
      prediction_layers == 0 || hidden == 0 || projection == 0 || vocab_size == 0)
    throw InvalidArgument("model config extents must all be positive");
}

void to_json(nlohmann::json &j, const ModelConfig &c) {
  j = nlohmann::json{{"input_dim", c.input_dim},
                     {"stack_factor", c.stack_factor},
                     {"stride", c.stride},
                     {"encoder_layers", c.encoder_layers},
                     {"prediction_layers", c.prediction_layers},
                     {"hidden", c.hidden},
                     {"projection", c.projection},
                     {"vocab_size", c.vocab_size},
                     {"use_layer_norm", c.use_layer_norm}};
}

void from_json(const nlohmann::json &j, ModelConfig &c) {
  ModelConfig d;
  c.input_dim = j.value("input_dim", d.input_dim);
  c.stack_factor = j.value("stack_factor", d.stack_factor);
  c.stride = j.value("stride", d.stride);
  c.encoder_layers = j.value("encoder_layers", d.encoder_layers);
  c.prediction_layers = j.value("prediction_layers", d.prediction_layers);
  c.hidden = j.value("hidden", d.hidden);
  c.projection = j.value("projection", d.projection);
  c.vocab_size = j.value("vocab_size", d.vocab_size);
  c.use_layer_norm = j.value("use_layer_norm", d.use_layer_norm);
}

Tensor stack_frames(const Tensor &features, std::size_t stack, std::size_t stride) {
  if (stack == 0 || stride == 0)
    throw InvalidArgument("stack_frames: stack and stride must be >= 1");
  if (features.rank() != 2) throw InvalidArgument("stack_frames: need an N x d matrix");
  const std::size_t N = features.dim(0), d = features.dim(1);
  const std::size_t T = (N + stride - 1) / stride;
  Tensor out({T, d * stack});
  for (std::size_t t = 0; t < T; ++t)
    for (std::size_t s = 0; s < stack; ++s) {
      std::size_t src = t * stride + s;
      if (src >= N) break;
      std::ranges::copy(features.row(src), out.row(t).begin() + s * d);
    }
  return out;
}

void check_tokens(std::span<const int> tokens, std::size_t vocab) {
  for (int y : tokens)
    if (y < 0 || static_cast<std::size_t>(y) >= vocab)
      throw InvalidArgument("token id " + std::to_string(y) +
                            " outside vocabulary of " + std::to_string(vocab));
}

LinearHead::LinearHead(std::size_t input, std::size_t output)
    : weight({input, output}), bias({output}) {}

Var LinearHead::forward(Tape &tape, Var x) {
  return add_row_bias(matmul(x, tape.param(weight)), tape.param(bias));
}

void LinearHead::init(Rng &rng) {
  xavier_uniform(weight, weight.dim(0), weight.dim(1), rng);
  for (double &v : bias.data()) v = 0.0;
}

void LinearHead::collect(const std::string &prefix, NamedParams &out) {
  out.emplace_back(prefix + ".weight", &weight);
  out.emplace_back(prefix + ".bias", &bias);
}

PredictionNetwork::PredictionNetwork(std::size_t vocab, std::size_t hidden,
                                     std::size_t layers, bool layer_norm)
    : embedding({vocab, hidden}), lstm(hidden, hidden, layers, layer_norm) {}

Var PredictionNetwork::forward(Tape &tape, std::span<const int> prefix) {
  check_tokens(prefix, vocab_size());
  std::vector<int> ids;
  ids.reserve(prefix.size() + 1);
  ids.push_back(-1);
  ids.insert(ids.end(), prefix.begin(), prefix.end());
  Var emb = gather_rows(tape.param(embedding), ids);
  return lstm.forward(tape, emb);
}

PredictionNetwork::State PredictionNetwork::start() const {
  State s{lstm.initial_state(), {}};
  std::vector<double> zero(embedding.dim(1), 0.0);
  auto h = lstm.step(s.lstm, zero);
  s.output.assign(h.begin(), h.end());
  return s;
}

PredictionNetwork::State PredictionNetwork::extend(const State &state, int token) const {
  if (token < 0 || static_cast<std::size_t>(token) >= vocab_size())
    throw InvalidArgument("prediction input " + std::to_string(token) +
                          " outside vocabulary");
  State s{state.lstm, {}};
  auto h = lstm.step(s.lstm, embedding.row(token));
  s.output.assign(h.begin(), h.end());
  return s;
}

void PredictionNetwork::init(Rng &rng) {
  xavier_uniform(embedding, embedding.dim(0), embedding.dim(1), rng);
  lstm.init(rng);
}

void PredictionNetwork::collect(const std::string &prefix, NamedParams &out) {
  out.emplace_back(prefix + ".embedding", &embedding);
  lstm.collect(prefix + ".lstm", out);
}

JointNetwork::JointNetwork(std::size_t enc_width, std::size_t pred_width,
                           std::size_t projection, std::size_t classes)
    : enc_weight({enc_width, projection}),
      pred_weight({pred_width, projection}),
      bias({projection}),
      out_weight({projection, classes}),
      out_bias({classes}) {}

Var JointNetwork::forward(Tape &tape, Var h_enc, Var h_pre) {
  const std::size_t T = h_enc.value().dim(0), R = h_pre.value().dim(0);
  if (h_enc.value().dim(1) != enc_weight.dim(0) ||
      h_pre.value().dim(1) != pred_weight.dim(0))
    throw InvalidArgument("joint: input widths " + shape_string(h_enc.shape()) +
                          ", " + shape_string(h_pre.shape()) +
                          " do not match projections");
  Var e = matmul(h_enc, tape.param(enc_weight));
  Var p = add_row_bias(matmul(h_pre, tape.param(pred_weight)), tape.param(bias));
  Var z = add_row_bias(matmul(pairwise_add(e, p), tape.param(out_weight)),
                       tape.param(out_bias));
  return reshape(z, {T, R, num_classes()});
}

std::vector<double> JointNetwork::project_encoder(std::span<const double> h) const {
  const std::size_t P = bias.size();
  std::vector<double> out(P, 0.0);
  for (std::size_t i = 0; i < h.size(); ++i)
    for (std::size_t j = 0; j < P; ++j) out[j] += h[i] * enc_weight[i * P + j];
  return out;
}

std::vector<double> JointNetwork::project_prediction(std::span<const double> h) const {
  const std::size_t P = bias.size();
  std::vector<double> out(P, 0.0);
  for (std::size_t i = 0; i < h.size(); ++i)
    for (std::size_t j = 0; j < P; ++j) out[j] += h[i] * pred_weight[i * P + j];
  for (std::size_t j = 0; j < P; ++j) out[j] += bias[j];
  return out;
}

void JointNetwork::log_probs(std::span<const double> enc_proj,
                             std::span<const double> pred_proj,
                             std::span<double> out) const {
  const std::size_t P = bias.size(), K = num_classes();
  for (std::size_t k = 0; k < K; ++k) out[k] = out_bias[k];
  for (std::size_t j = 0; j < P; ++j) {
    double v = enc_proj[j] + pred_proj[j];
    for (std::size_t k = 0; k < K; ++k) out[k] += v * out_weight[j * K + k];
  }
  double m = *std::max_element(out.begin(), out.end());
  double s = 0.0;
  for (double v : out) s += std::exp(v - m);
  double lse = m + std::log(s);
  for (double &v : out) v -= lse;
}

void JointNetwork::init(Rng &rng) {
  xavier_uniform(enc_weight, enc_weight.dim(0), enc_weight.dim(1), rng);
  xavier_uniform(pred_weight, pred_weight.dim(0), pred_weight.dim(1), rng);
  xavier_uniform(out_weight, out_weight.dim(0), out_weight.dim(1), rng);
  for (double &v : bias.data()) v = 0.0;
  for (double &v : out_bias.data()) v = 0.0;
}

void JointNetwork::collect(const std::string &prefix, NamedParams &out) {
  out.emplace_back(prefix + ".enc_weight", &enc_weight);
  out.emplace_back(prefix + ".pred_weight", &pred_weight);
  out.emplace_back(prefix + ".bias", &bias);
  out.emplace_back(prefix + ".out_weight", &out_weight);
  out.emplace_back(prefix + ".out_bias", &out_bias);
}

RnntModel::RnntModel(const ModelConfig &config)
    : encoder((config.validate(), config.frame_dim()), config.hidden,
              config.encoder_layers, config.use_layer_norm),
      prediction(config.vocab_size, config.hidden, config.prediction_layers,
                 config.use_layer_norm),
      joint_net(config.hidden, config.hidden, config.projection, config.num_classes()),
      config_(config) {}

void RnntModel::init(std::uint64_t seed) {
  Rng rng(seed);
  encoder.init(rng);
  prediction.init(rng);
  joint_net.init(rng);
}

Var RnntModel::encode(Tape &tape, const Tensor &x) {
  if (x.rank() != 2 || x.dim(1) != config_.frame_dim())
    throw InvalidArgument("encode: expected T x " + std::to_string(config_.frame_dim()) +
                          " frames, got " + shape_string(x.shape()));
  return encoder.forward(tape, tape.constant(x));
}

Var RnntModel::predict(Tape &tape, std::span<const int> prefix) {
  return prediction.forward(tape, prefix);
}

Var RnntModel::joint(Tape &tape, Var h_enc, Var h_pre) {
  return joint_net.forward(tape, h_enc, h_pre);
}

Var RnntModel::logits(Tape &tape, const Tensor &x, std::span<const int> targets) {
  Var e = encode(tape, x);
  Var p = predict(tape, targets);
  return joint(tape, e, p);
}

NamedParams RnntModel::named_parameters() {
  NamedParams out;
  encoder.collect("encoder", out);
  prediction.collect("prediction", out);
  joint_net.collect("joint", out);
  return out;
}

std::vector<Tensor *> RnntModel::parameters() { return parameters(""); }

std::vector<Tensor *> RnntModel::parameters(const std::string &prefix) {
  std::vector<Tensor *> out;
  for (auto &[name, t] : named_parameters())
    if (name.starts_with(prefix)) out.push_back(t);
  return out;
}

}  // namespace rnnt
