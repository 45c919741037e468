// rnnt-lab/include/rnnt/lstm.h

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

#ifndef RNNT_LSTM_H_
#define RNNT_LSTM_H_

#include <span>
#include <string>
#include <utility>
#include <vector>

#include "rnnt/autograd.h"
#include "rnnt/optim.h"
#include "rnnt/tensor.h"

namespace rnnt {

using NamedParams = std::vector<std::pair<std::string, Tensor *>>;

// One LSTM layer.  Gate pre-activations are laid out [i | f | g | o]; with
// layer_norm the 4H pre-activation vector is normalized before the gates.
struct LstmLayer {
  LstmLayer(std::size_t input, std::size_t hidden, bool layer_norm);

  std::size_t input_size;
  std::size_t hidden_size;
  bool layer_norm;
  Tensor w_input;      // [input x 4H]
  Tensor w_recurrent;  // [H x 4H]
  Tensor bias;         // [4H]
  Tensor ln_gain;      // [4H], only with layer_norm
  Tensor ln_shift;     // [4H], only with layer_norm

  void init(Rng &rng);
  void collect(const std::string &prefix, NamedParams &out);
};

struct LstmState {
  std::vector<std::vector<double>> h;  // per layer
  std::vector<std::vector<double>> c;
};

class LstmStack {
 public:
  LstmStack(std::size_t input, std::size_t hidden, std::size_t layers,
            bool layer_norm);

  std::size_t input_size() const { return layers_.front().input_size; }
  std::size_t hidden_size() const { return layers_.front().hidden_size; }
  std::size_t num_layers() const { return layers_.size(); }
  std::vector<LstmLayer> &layers() { return layers_; }
  const std::vector<LstmLayer> &layers() const { return layers_; }

  // x: [T x input] -> [T x H], zero initial state.
  Var forward(Tape &tape, Var x);

  LstmState initial_state() const;
  // Advances every layer by one input vector; returns the top layer's h.
  std::span<const double> step(LstmState &state, std::span<const double> input) const;

  void init(Rng &rng);
  void collect(const std::string &prefix, NamedParams &out);

 private:
  std::vector<LstmLayer> layers_;
};

// Whole-sequence LSTM layer as a single tape node; the backward pass is
// truncation-free BPTT.
Var lstm_layer(Tape &tape, Var x, LstmLayer &layer);

}  // namespace rnnt

#endif  // RNNT_LSTM_H_
