// rnnt-lab/include/rnnt/label_tensor.h

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

#ifndef RNNT_LABEL_TENSOR_H_
#define RNNT_LABEL_TENSOR_H_

#include <cstddef>
#include <vector>

#include "rnnt/tensor.h"

namespace rnnt {

// Masked 3-D target for whole-network CE pre-training: for every lattice
// cell (t, u) either a target class or "unused".  Laid out [frames x rows]
// with rows = U + 1 along the token axis.
class LabelTensor {
 public:
  LabelTensor(std::size_t frames, std::size_t rows, std::size_t classes);

  std::size_t frames() const { return frames_; }
  std::size_t rows() const { return rows_; }
  std::size_t classes() const { return classes_; }

  bool masked(std::size_t t, std::size_t u) const { return target_[t * rows_ + u] >= 0; }
  // Class id of a masked cell, -1 otherwise.
  int target(std::size_t t, std::size_t u) const { return target_[t * rows_ + u]; }
  void set(std::size_t t, std::size_t u, int cls);
  void clear(std::size_t t, std::size_t u) { target_[t * rows_ + u] = -1; }

  std::size_t mask_count() const;
  // [frames x rows x classes], one-hot at masked cells, zero elsewhere.
  Tensor one_hot() const;

  bool operator==(const LabelTensor &) const = default;

 private:
  std::size_t frames_, rows_, classes_;
  std::vector<int> target_;
};

}  // namespace rnnt

#endif  // RNNT_LABEL_TENSOR_H_
