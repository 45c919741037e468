// rnnt-lab/include/rnnt/model.h

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

#ifndef RNNT_MODEL_H_
#define RNNT_MODEL_H_

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "json.hpp"
#include "rnnt/autograd.h"
#include "rnnt/lstm.h"
#include "rnnt/tensor.h"

namespace rnnt {

struct ModelConfig {
  std::size_t input_dim = 8;     // raw feature width
  std::size_t stack_factor = 4;  // raw frames concatenated per encoder step
  std::size_t stride = 2;        // raw frames advanced per encoder step
  std::size_t encoder_layers = 2;
  std::size_t prediction_layers = 1;
  std::size_t hidden = 64;
  std::size_t projection = 32;  // joint inner width
  std::size_t vocab_size = 8;   // non-blank classes, including space
  bool use_layer_norm = false;

  void validate() const;
  std::size_t frame_dim() const { return input_dim * stack_factor; }
  std::size_t num_classes() const { return vocab_size + 1; }
  int blank() const { return static_cast<int>(vocab_size); }
};

void to_json(nlohmann::json &j, const ModelConfig &c);
void from_json(const nlohmann::json &j, ModelConfig &c);

// Frame t concatenates raw rows [t*stride, t*stride + stack), zero padded
// past the end; ceil(N / stride) frames.
Tensor stack_frames(const Tensor &features, std::size_t stack, std::size_t stride);

// Affine map to a fixed output width, used for the throwaway classification
// heads of the pre-training schedules.
class LinearHead {
 public:
  LinearHead(std::size_t input, std::size_t output);

  Var forward(Tape &tape, Var x);
  void init(Rng &rng);
  void collect(const std::string &prefix, NamedParams &out);

  Tensor weight;  // [input x output]
  Tensor bias;    // [output]
};

class PredictionNetwork {
 public:
  PredictionNetwork(std::size_t vocab, std::size_t hidden, std::size_t layers,
                    bool layer_norm);

  // Rows for the contexts [start, y1, ..., yU]: (U+1) x H.
  Var forward(Tape &tape, std::span<const int> prefix);

  // Streaming interface: the start state has already consumed the start
  // symbol.  output() is the current context's representation.
  struct State {
    LstmState lstm;
    std::vector<double> output;
  };
  State start() const;
  State extend(const State &state, int token) const;

  std::size_t vocab_size() const { return embedding.dim(0); }
  void init(Rng &rng);
  void collect(const std::string &prefix, NamedParams &out);

  Tensor embedding;  // [vocab x H]; the start symbol is an all-zero input
  LstmStack lstm;
};

// z[t,u] = W_out (W_e h_enc[t] + W_p h_pre[u] + b) + b_out.
class JointNetwork {
 public:
  JointNetwork(std::size_t enc_width, std::size_t pred_width,
               std::size_t projection, std::size_t classes);

  // Logits [T x R x classes].
  Var forward(Tape &tape, Var h_enc, Var h_pre);

  std::vector<double> project_encoder(std::span<const double> h_enc) const;
  std::vector<double> project_prediction(std::span<const double> h_pre) const;
  // Log-probabilities for one lattice cell from the two projections.
  void log_probs(std::span<const double> enc_proj, std::span<const double> pred_proj,
                 std::span<double> out) const;

  std::size_t num_classes() const { return out_bias.size(); }
  void init(Rng &rng);
  void collect(const std::string &prefix, NamedParams &out);

  Tensor enc_weight;   // [H_enc x P]
  Tensor pred_weight;  // [H_pre x P]
  Tensor bias;         // [P]
  Tensor out_weight;   // [P x classes]
  Tensor out_bias;     // [classes]
};

class RnntModel {
 public:
  explicit RnntModel(const ModelConfig &config);

  const ModelConfig &config() const { return config_; }

  // Deterministic Xavier-uniform weights, zero biases.
  void init(std::uint64_t seed);

  // x: [T x frame_dim] stacked frames.
  Var encode(Tape &tape, const Tensor &x);
  Var predict(Tape &tape, std::span<const int> prefix);
  Var joint(Tape &tape, Var h_enc, Var h_pre);
  // encode + predict + joint in one go: logits [T x (U+1) x classes].
  Var logits(Tape &tape, const Tensor &x, std::span<const int> targets);

  NamedParams named_parameters();
  std::vector<Tensor *> parameters();
  // Parameters whose name starts with `prefix` ("encoder.", "prediction.").
  std::vector<Tensor *> parameters(const std::string &prefix);

  LstmStack encoder;
  PredictionNetwork prediction;
  JointNetwork joint_net;

 private:
  ModelConfig config_;
};

void check_tokens(std::span<const int> tokens, std::size_t vocab);

}  // namespace rnnt

#endif  // RNNT_MODEL_H_
