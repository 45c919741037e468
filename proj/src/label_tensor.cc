// rnnt-lab/src/label_tensor.cc

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

#include "rnnt/label_tensor.h"

#include <algorithm>

namespace rnnt {

LabelTensor::LabelTensor(std::size_t frames, std::size_t rows, std::size_t classes)
    : frames_(frames), rows_(rows), classes_(classes), target_(frames * rows, -1) {
  if (frames == 0 || rows == 0 || classes == 0)
    throw InvalidArgument("label tensor extents must be positive");
}

void LabelTensor::set(std::size_t t, std::size_t u, int cls) {
  if (t >= frames_ || u >= rows_)
    throw InvalidArgument("label cell (" + std::to_string(t) + ", " +
                          std::to_string(u) + ") outside " + std::to_string(frames_) +
                          " x " + std::to_string(rows_));
  if (cls < 0 || static_cast<std::size_t>(cls) >= classes_)
    throw InvalidArgument("label class " + std::to_string(cls) + " out of range");
  target_[t * rows_ + u] = cls;
}

std::size_t LabelTensor::mask_count() const {
  return static_cast<std::size_t>(
      std::ranges::count_if(target_, [](int c) { return c >= 0; }));
}

Tensor LabelTensor::one_hot() const {
  Tensor out({frames_, rows_, classes_});
  for (std::size_t t = 0; t < frames_; ++t)
    for (std::size_t u = 0; u < rows_; ++u)
      if (masked(t, u)) out.at(t, u, target(t, u)) = 1.0;
  return out;
}

}  // namespace rnnt
