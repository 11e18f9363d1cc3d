// Copyright 2026 The ilfo Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef ILFO_AUTODIFF_TENSOR_H_
#define ILFO_AUTODIFF_TENSOR_H_

#include <cstddef>
#include <span>
#include <string>
#include <vector>

namespace ilfo::ad {

// Row-major 2-D shape. Vectors are 1 x n rows; batches stack rows.
struct Shape {
  std::size_t rows = 0;
  std::size_t cols = 0;

  std::size_t size() const { return rows * cols; }
  bool operator==(const Shape&) const = default;
  std::string ToString() const;
};

// Dense row-major array of doubles.
class Tensor {
 public:
  Tensor() = default;
  explicit Tensor(Shape shape, double fill = 0.0);
  Tensor(Shape shape, std::vector<double> values);

  static Tensor Scalar(double v) { return Tensor({1, 1}, {v}); }
  static Tensor Row(std::span<const double> values);
  static Tensor FromRows(const std::vector<std::vector<double>>& rows);

  const Shape& shape() const { return shape_; }
  std::size_t rows() const { return shape_.rows; }
  std::size_t cols() const { return shape_.cols; }
  std::size_t size() const { return values_.size(); }

  double& operator()(std::size_t r, std::size_t c) {
    return values_[r * shape_.cols + c];
  }
  double operator()(std::size_t r, std::size_t c) const {
    return values_[r * shape_.cols + c];
  }
  double& operator[](std::size_t i) { return values_[i]; }
  double operator[](std::size_t i) const { return values_[i]; }

  std::span<double> values() { return values_; }
  std::span<const double> values() const { return values_; }
  std::vector<double> RowVector(std::size_t r) const;

  // Only valid for 1x1 tensors.
  double item() const;

  void Fill(double v);
  double SquaredNorm() const;

  // Bitwise equality of shape and contents.
  bool operator==(const Tensor& other) const;

 private:
  Shape shape_;
  std::vector<double> values_;
};

}  // namespace ilfo::ad

#endif  // ILFO_AUTODIFF_TENSOR_H_
