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

#include "ilfo/autodiff/tensor.h"

#include <algorithm>
#include <cstring>
#include <utility>

#include "ilfo/errors.h"

namespace ilfo::ad {

std::string Shape::ToString() const {
  return "[" + std::to_string(rows) + " x " + std::to_string(cols) + "]";
}

Tensor::Tensor(Shape shape, double fill)
    : shape_(shape), values_(shape.size(), fill) {}

Tensor::Tensor(Shape shape, std::vector<double> values)
    : shape_(shape), values_(std::move(values)) {
  if (values_.size() != shape_.size()) {
    throw DimensionError("tensor of shape " + shape_.ToString() + " given " +
                         std::to_string(values_.size()) + " values");
  }
}

Tensor Tensor::Row(std::span<const double> values) {
  return Tensor({1, values.size()},
                std::vector<double>(values.begin(), values.end()));
}

Tensor Tensor::FromRows(const std::vector<std::vector<double>>& rows) {
  if (rows.empty()) return Tensor({0, 0});
  const std::size_t cols = rows.front().size();
  Tensor t({rows.size(), cols});
  for (std::size_t r = 0; r < rows.size(); ++r) {
    if (rows[r].size() != cols) {
      throw DimensionError("ragged rows: row 0 has " + std::to_string(cols) +
                           " columns, row " + std::to_string(r) + " has " +
                           std::to_string(rows[r].size()));
    }
    std::copy(rows[r].begin(), rows[r].end(), t.values_.begin() + r * cols);
  }
  return t;
}

std::vector<double> Tensor::RowVector(std::size_t r) const {
  const auto begin = values_.begin() + static_cast<std::ptrdiff_t>(r * cols());
  return std::vector<double>(begin, begin + static_cast<std::ptrdiff_t>(cols()));
}

double Tensor::item() const {
  if (size() != 1) {
    throw ContractError("item() on tensor of shape " + shape_.ToString());
  }
  return values_[0];
}

void Tensor::Fill(double v) { std::fill(values_.begin(), values_.end(), v); }

double Tensor::SquaredNorm() const {
  double s = 0.0;
  for (double v : values_) s += v * v;
  return s;
}

bool Tensor::operator==(const Tensor& other) const {
  return shape_ == other.shape_ &&
         (values_.empty() ||
          std::memcmp(values_.data(), other.values_.data(),
                      values_.size() * sizeof(double)) == 0);
}

}  // namespace ilfo::ad
