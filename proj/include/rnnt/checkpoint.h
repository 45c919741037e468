// rnnt-lab/include/rnnt/checkpoint.h

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

#ifndef RNNT_CHECKPOINT_H_
#define RNNT_CHECKPOINT_H_

#include <filesystem>
#include <map>
#include <string>

#include "json.hpp"
#include "rnnt/model.h"
#include "rnnt/tensor.h"

namespace rnnt {

// Named parameter tensors plus the model config they were taken from.
//
// On disk this is a single JSON document:
//
//   {"format": "rnnt-lab-checkpoint", "version": 1,
//    "config": {...ModelConfig...},
//    "tensors": [{"name": "encoder.l0.w_input", "shape": [32, 256],
//                 "data": [...row-major doubles...]}, ...]}
//
// Tensors are written in name order; doubles use shortest round-trip
// formatting, so save(load(f)) reproduces f byte for byte.
struct Checkpoint {
  ModelConfig config;
  std::map<std::string, Tensor> tensors;
};

inline constexpr const char *kCheckpointFormat = "rnnt-lab-checkpoint";
inline constexpr int kCheckpointVersion = 1;

Checkpoint snapshot(RnntModel &model);

// Copies every tensor whose name starts with `prefix` into the model.
// Shapes must match; a missing tensor is an error.  Returns the number of
// tensors copied.
std::size_t restore(RnntModel &model, const Checkpoint &ckpt,
                    const std::string &prefix = "");

nlohmann::json checkpoint_to_json(const Checkpoint &ckpt);
Checkpoint checkpoint_from_json(const nlohmann::json &j);

void save_checkpoint(const Checkpoint &ckpt, const std::filesystem::path &path);
Checkpoint load_checkpoint(const std::filesystem::path &path);

}  // namespace rnnt

#endif  // RNNT_CHECKPOINT_H_
