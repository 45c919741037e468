// rnnt-lab/src/checkpoint.cc

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

#include "rnnt/checkpoint.h"

#include <fstream>
#include <stdexcept>

namespace rnnt {

Checkpoint snapshot(RnntModel &model) {
  Checkpoint ckpt{model.config(), {}};
  for (auto &[name, t] : model.named_parameters())
    ckpt.tensors.emplace(name, Tensor(t->shape(), std::vector<double>(
                                                      t->data().begin(), t->data().end())));
  return ckpt;
}

std::size_t restore(RnntModel &model, const Checkpoint &ckpt, const std::string &prefix) {
  std::size_t copied = 0;
  for (auto &[name, t] : model.named_parameters()) {
    if (!name.starts_with(prefix)) continue;
    auto it = ckpt.tensors.find(name);
    if (it == ckpt.tensors.end())
      throw InvalidArgument("checkpoint has no tensor '" + name + "'");
    if (it->second.shape() != t->shape())
      throw InvalidArgument("checkpoint tensor '" + name + "' has shape " +
                            shape_string(it->second.shape()) + ", model expects " +
                            shape_string(t->shape()));
    std::ranges::copy(it->second.data(), t->data().begin());
    ++copied;
  }
  return copied;
}

nlohmann::json checkpoint_to_json(const Checkpoint &ckpt) {
  nlohmann::json tensors = nlohmann::json::array();
  for (const auto &[name, t] : ckpt.tensors) {
    nlohmann::json data(std::vector<double>(t.data().begin(), t.data().end()));
    tensors.push_back({{"name", name}, {"shape", t.shape()}, {"data", std::move(data)}});
  }
  return {{"format", kCheckpointFormat},
          {"version", kCheckpointVersion},
          {"config", ckpt.config},
          {"tensors", std::move(tensors)}};
}

Checkpoint checkpoint_from_json(const nlohmann::json &j) {
  if (j.value("format", "") != kCheckpointFormat)
    throw InvalidArgument("not an rnnt-lab checkpoint");
  if (j.value("version", 0) != kCheckpointVersion)
    throw InvalidArgument("unsupported checkpoint version " +
                          std::to_string(j.value("version", 0)));
  Checkpoint ckpt;
  ckpt.config = j.at("config").get<ModelConfig>();
  for (const auto &e : j.at("tensors")) {
    Shape shape = e.at("shape").get<Shape>();
    std::vector<double> data = e.at("data").get<std::vector<double>>();
    ckpt.tensors.emplace(e.at("name").get<std::string>(),
                         Tensor(std::move(shape), std::move(data)));
  }
  return ckpt;
}

void save_checkpoint(const Checkpoint &ckpt, const std::filesystem::path &path) {
  std::ofstream os(path);
  if (!os) throw std::runtime_error("cannot write " + path.string());
  os << checkpoint_to_json(ckpt).dump() << '\n';
}

Checkpoint load_checkpoint(const std::filesystem::path &path) {
  std::ifstream is(path);
  if (!is) throw std::runtime_error("cannot read " + path.string());
  return checkpoint_from_json(nlohmann::json::parse(is));
}

}  // namespace rnnt
