// rnnt-lab/src/tensor.cc

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

#include "rnnt/tensor.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace rnnt {

std::string shape_string(const Shape &shape) {
  std::ostringstream os;
  os << '[';
  for (std::size_t i = 0; i < shape.size(); ++i) {
    if (i) os << 'x';
    os << shape[i];
  }
  os << ']';
  return os.str();
}

std::size_t shape_size(const Shape &shape) {
  std::size_t n = 1;
  for (std::size_t d : shape) n *= d;
  return n;
}

static void check_extents(const Shape &shape) {
  if (shape.empty()) throw InvalidArgument("tensor needs at least one extent");
  for (std::size_t d : shape)
    if (d == 0)
      throw InvalidArgument("tensor extents must be positive, got " +
                            shape_string(shape));
}

Tensor::Tensor(Shape shape, double fill) : shape_(std::move(shape)) {
  check_extents(shape_);
  data_.assign(shape_size(shape_), fill);
}

Tensor::Tensor(Shape shape, std::vector<double> data)
    : shape_(std::move(shape)), data_(std::move(data)) {
  check_extents(shape_);
  if (data_.size() != shape_size(shape_))
    throw InvalidArgument("tensor of shape " + shape_string(shape_) +
                          " cannot hold " + std::to_string(data_.size()) +
                          " values");
}

Tensor Tensor::matrix(
    std::initializer_list<std::initializer_list<double>> rows) {
  std::size_t cols = rows.size() ? rows.begin()->size() : 0;
  std::vector<double> data;
  for (const auto &r : rows) {
    if (r.size() != cols) throw InvalidArgument("ragged matrix literal");
    data.insert(data.end(), r.begin(), r.end());
  }
  return Tensor({rows.size(), cols}, std::move(data));
}

Tensor Tensor::vector(std::initializer_list<double> values) {
  return Tensor({values.size()}, std::vector<double>(values));
}

std::span<double> Tensor::row(std::size_t i) {
  std::size_t width = data_.size() / shape_[0];
  return std::span<double>(data_).subspan(i * width, width);
}

std::span<const double> Tensor::row(std::size_t i) const {
  std::size_t width = data_.size() / shape_[0];
  return std::span<const double>(data_).subspan(i * width, width);
}

Tensor Tensor::reshaped(Shape shape) const {
  if (shape_size(shape) != data_.size())
    throw InvalidArgument("cannot reshape " + shape_string(shape_) + " to " +
                          shape_string(shape));
  return Tensor(std::move(shape), data_);
}

std::span<double> Tensor::grad() {
  if (grad_.size() != data_.size()) grad_.assign(data_.size(), 0.0);
  return grad_;
}

void Tensor::zero_grad() { grad_.assign(data_.size(), 0.0); }

double logsumexp(std::span<const double> xs) {
  if (xs.empty()) throw InvalidArgument("logsumexp of an empty sequence");
  double m = *std::max_element(xs.begin(), xs.end());
  if (m == -std::numeric_limits<double>::infinity()) return m;
  double s = 0.0;
  for (double x : xs) s += std::exp(x - m);
  return m + std::log(s);
}

double log_add(double a, double b) {
  if (a < b) std::swap(a, b);
  if (b == -std::numeric_limits<double>::infinity()) return a;
  return a + std::log1p(std::exp(b - a));
}

Tensor log_softmax(const Tensor &x) {
  std::size_t k = x.shape().back();
  Tensor y = x;
  for (double v : x.data())
    if (!std::isfinite(v))
      throw InvalidArgument("log_softmax input must be finite");
  auto out = y.data();
  for (std::size_t off = 0; off < out.size(); off += k) {
    auto slice = out.subspan(off, k);
    double m = *std::max_element(slice.begin(), slice.end());
    double s = 0.0;
    for (double v : slice) s += std::exp(v - m);
    double lse = m + std::log(s);
    for (double &v : slice) v -= lse;
  }
  return y;
}

}  // namespace rnnt
