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

#include "ilfo/autodiff/optim.h"

#include <cmath>

#include "ilfo/errors.h"

namespace ilfo::ad {
namespace {

const Tensor& GradientFor(const ParameterSet& params, const GradientMap& grads,
                          const std::string& name) {
  auto it = grads.find(name);
  if (it == grads.end()) {
    throw IncompleteGradientError("no gradient for trainable parameter '" +
                                  name + "'");
  }
  if (!(it->second.shape() == params.Get(name).shape())) {
    throw DimensionError("gradient for '" + name + "' has shape " +
                         it->second.shape().ToString() + ", parameter has " +
                         params.Get(name).shape().ToString());
  }
  return it->second;
}

}  // namespace

void AdamStep(ParameterSet& params, const GradientMap& grads, AdamState& state,
              double lr) {
  if (!(lr >= 0.0)) throw ContractError("learning rate must be >= 0");
  // Validate before mutating anything.
  for (const auto& name : params.names()) {
    if (params.trainable(name)) GradientFor(params, grads, name);
  }
  state.t += 1;
  const double c1 = 1.0 - std::pow(state.beta1, static_cast<double>(state.t));
  const double c2 = 1.0 - std::pow(state.beta2, static_cast<double>(state.t));
  for (const auto& name : params.names()) {
    if (!params.trainable(name)) continue;
    const Tensor& g = GradientFor(params, grads, name);
    auto [mit, _m] = state.m.try_emplace(name, g.shape());
    auto [vit, _v] = state.v.try_emplace(name, g.shape());
    Tensor& m = mit->second;
    Tensor& v = vit->second;
    std::span<double> w = params.MutableValues(name);
    for (std::size_t i = 0; i < g.size(); ++i) {
      m[i] = state.beta1 * m[i] + (1.0 - state.beta1) * g[i];
      v[i] = state.beta2 * v[i] + (1.0 - state.beta2) * g[i] * g[i];
      const double m_hat = m[i] / c1;
      const double v_hat = v[i] / c2;
      w[i] -= lr * m_hat / (std::sqrt(v_hat) + state.epsilon);
    }
  }
}

void SgdStep(ParameterSet& params, const GradientMap& grads, double lr) {
  if (!(lr >= 0.0)) throw ContractError("learning rate must be >= 0");
  for (const auto& name : params.names()) {
    if (params.trainable(name)) GradientFor(params, grads, name);
  }
  for (const auto& name : params.names()) {
    if (!params.trainable(name)) continue;
    const Tensor& g = grads.at(name);
    std::span<double> w = params.MutableValues(name);
    for (std::size_t i = 0; i < g.size(); ++i) w[i] -= lr * g[i];
  }
}

GradientMap ClipGradients(GradientMap grads, double max_norm) {
  if (!(max_norm > 0.0)) throw ContractError("max_norm must be > 0");
  const double norm = GlobalNorm(grads);
  if (norm <= max_norm) return grads;
  const double k = max_norm / norm;
  for (auto& [_, g] : grads) {
    for (double& x : g.values()) x *= k;
  }
  return grads;
}

}  // namespace ilfo::ad
