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

#include "ilfo/autodiff/parameters.h"

#include <algorithm>
#include <cmath>

#include "ilfo/errors.h"
#include "ilfo/random.h"

namespace ilfo::ad {

void ParameterSet::Add(const std::string& name, Tensor init, bool trainable) {
  if (entries_.contains(name)) {
    throw ContractError("duplicate parameter name '" + name + "'");
  }
  names_.push_back(name);
  entries_.emplace(name, Entry{std::move(init), trainable});
}

bool ParameterSet::Contains(const std::string& name) const {
  return entries_.contains(name);
}

const ParameterSet::Entry& ParameterSet::At(const std::string& name) const {
  auto it = entries_.find(name);
  if (it == entries_.end()) {
    throw ContractError("unknown parameter '" + name + "' in set '" + name_ +
                        "'");
  }
  return it->second;
}

ParameterSet::Entry& ParameterSet::At(const std::string& name) {
  return const_cast<Entry&>(std::as_const(*this).At(name));
}

const Tensor& ParameterSet::Get(const std::string& name) const {
  return At(name).value;
}

std::span<double> ParameterSet::MutableValues(const std::string& name) {
  return At(name).value.values();
}

void ParameterSet::Set(const std::string& name, const Tensor& t) {
  Entry& e = At(name);
  if (!(e.value.shape() == t.shape())) {
    throw DimensionError("parameter '" + name + "' has shape " +
                         e.value.shape().ToString() + ", got " +
                         t.shape().ToString());
  }
  e.value = t;
}

bool ParameterSet::trainable(const std::string& name) const {
  return At(name).trainable;
}

void ParameterSet::SetTrainable(const std::string& name, bool trainable) {
  At(name).trainable = trainable;
}

void ParameterSet::SetAllTrainable(bool trainable) {
  for (auto& [_, e] : entries_) e.trainable = trainable;
}

std::size_t ParameterSet::NumScalars() const {
  std::size_t n = 0;
  for (const auto& [_, e] : entries_) n += e.value.size();
  return n;
}

std::uint64_t ParameterSet::Hash() const {
  std::uint64_t h = Fnv1a(name_);
  for (const auto& n : names_) {
    const Tensor& t = At(n).value;
    h = Fnv1a(n, h);
    const std::size_t dims[2] = {t.rows(), t.cols()};
    h = Fnv1aBytes(dims, sizeof(dims), h);
    h = Fnv1aBytes(t.values().data(), t.size() * sizeof(double), h);
  }
  return h;
}

bool ParameterSet::SameValues(const ParameterSet& other) const {
  if (names_ != other.names_) return false;
  return std::all_of(names_.begin(), names_.end(), [&](const std::string& n) {
    return Get(n) == other.Get(n);
  });
}

double GlobalNorm(const GradientMap& grads) {
  double s = 0.0;
  for (const auto& [_, g] : grads) s += g.SquaredNorm();
  return std::sqrt(s);
}

}  // namespace ilfo::ad
