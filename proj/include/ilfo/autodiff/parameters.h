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

#ifndef ILFO_AUTODIFF_PARAMETERS_H_
#define ILFO_AUTODIFF_PARAMETERS_H_

#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "ilfo/autodiff/tensor.h"

namespace ilfo::ad {

// Gradients keyed by parameter name.
using GradientMap = std::map<std::string, Tensor>;

// Named parameter arrays in insertion order. Names are unique and shapes are
// fixed once an entry exists; only values and trainable flags change.
class ParameterSet {
 public:
  explicit ParameterSet(std::string name = {}) : name_(std::move(name)) {}

  const std::string& name() const { return name_; }

  void Add(const std::string& name, Tensor init, bool trainable = true);

  bool Contains(const std::string& name) const;
  const Tensor& Get(const std::string& name) const;
  // In-place access for optimizers and tests. The shape cannot change.
  std::span<double> MutableValues(const std::string& name);
  // Copies values from `t`, which must have the entry's shape.
  void Set(const std::string& name, const Tensor& t);

  bool trainable(const std::string& name) const;
  void SetTrainable(const std::string& name, bool trainable);
  void SetAllTrainable(bool trainable);

  const std::vector<std::string>& names() const { return names_; }
  std::size_t size() const { return names_.size(); }
  std::size_t NumScalars() const;

  // FNV-1a over names, shapes and value bytes (flags excluded).
  std::uint64_t Hash() const;

  // Values and names equal bitwise; trainable flags ignored.
  bool SameValues(const ParameterSet& other) const;

 private:
  struct Entry {
    Tensor value;
    bool trainable = true;
  };
  const Entry& At(const std::string& name) const;
  Entry& At(const std::string& name);

  std::string name_;
  std::vector<std::string> names_;
  std::unordered_map<std::string, Entry> entries_;
};

double GlobalNorm(const GradientMap& grads);

}  // namespace ilfo::ad

#endif  // ILFO_AUTODIFF_PARAMETERS_H_
