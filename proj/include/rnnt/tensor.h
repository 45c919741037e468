// rnnt-lab/include/rnnt/tensor.h

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

#ifndef RNNT_TENSOR_H_
#define RNNT_TENSOR_H_

#include <cstddef>
#include <initializer_list>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace rnnt {

// Thrown whenever an operation's precondition on its inputs does not hold
// (shape mismatch, out-of-range id, non-finite value, ...).
class InvalidArgument : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

using Shape = std::vector<std::size_t>;

std::string shape_string(const Shape &shape);
std::size_t shape_size(const Shape &shape);

// Dense row-major array of doubles with an optional gradient buffer of the
// same shape.  Parameters keep their gradient here; the tape accumulates into
// it with += so shared parameters receive summed contributions.
class Tensor {
 public:
  Tensor() = default;
  explicit Tensor(Shape shape, double fill = 0.0);
  Tensor(Shape shape, std::vector<double> data);

  // Convenience for tests: a rows x cols matrix from nested lists.
  static Tensor matrix(std::initializer_list<std::initializer_list<double>> rows);
  static Tensor vector(std::initializer_list<double> values);

  const Shape &shape() const { return shape_; }
  std::size_t rank() const { return shape_.size(); }
  std::size_t dim(std::size_t i) const { return shape_.at(i); }
  std::size_t size() const { return data_.size(); }
  bool empty() const { return data_.empty(); }

  std::span<double> data() { return data_; }
  std::span<const double> data() const { return data_; }
  double &operator[](std::size_t i) { return data_[i]; }
  const double &operator[](std::size_t i) const { return data_[i]; }

  double &at(std::size_t i, std::size_t j) { return data_[i * shape_[1] + j]; }
  const double &at(std::size_t i, std::size_t j) const {
    return data_[i * shape_[1] + j];
  }
  double &at(std::size_t i, std::size_t j, std::size_t k) {
    return data_[(i * shape_[1] + j) * shape_[2] + k];
  }
  const double &at(std::size_t i, std::size_t j, std::size_t k) const {
    return data_[(i * shape_[1] + j) * shape_[2] + k];
  }

  // Row i of a tensor viewed as [shape[0] x rest].
  std::span<double> row(std::size_t i);
  std::span<const double> row(std::size_t i) const;

  // Same data, new extents.  The element count must not change.
  Tensor reshaped(Shape shape) const;

  bool has_grad() const { return !grad_.empty(); }
  // Allocates a zeroed buffer on first use.
  std::span<double> grad();
  std::span<const double> grad() const { return grad_; }
  void zero_grad();
  void drop_grad() { grad_.clear(); }

  bool operator==(const Tensor &other) const {
    return shape_ == other.shape_ && data_ == other.data_;
  }

 private:
  Shape shape_;
  std::vector<double> data_;
  std::vector<double> grad_;
};

// Numerically stable log(sum(exp(xs))).  -inf entries are allowed; an
// all -inf input yields -inf.  Throws on empty input.
double logsumexp(std::span<const double> xs);
double log_add(double a, double b);

// Log-softmax over the last axis, computed with a max shift.
Tensor log_softmax(const Tensor &x);

}  // namespace rnnt

#endif  // RNNT_TENSOR_H_
