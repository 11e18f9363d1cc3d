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

#ifndef ILFO_AUTODIFF_OPTIM_H_
#define ILFO_AUTODIFF_OPTIM_H_

#include <cstdint>
#include <map>
#include <string>

#include "ilfo/autodiff/parameters.h"

namespace ilfo::ad {

// Adam moments keyed by parameter name. Moments are created lazily on the
// first step that touches an entry.
struct AdamState {
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
  std::int64_t t = 0;
  std::map<std::string, Tensor> m;
  std::map<std::string, Tensor> v;
};

// One bias-corrected Adam update of every trainable entry of `params`.
// Frozen entries are skipped (their moments are untouched). `t` advances by
// one even when lr == 0. Throws IncompleteGradientError when a trainable
// entry has no gradient.
void AdamStep(ParameterSet& params, const GradientMap& grads, AdamState& state,
              double lr);

// Plain descent step w -= lr * g on trainable entries.
void SgdStep(ParameterSet& params, const GradientMap& grads, double lr);

// Rescales all gradients by max_norm / ||g|| when the global L2 norm
// exceeds max_norm.
GradientMap ClipGradients(GradientMap grads, double max_norm);

}  // namespace ilfo::ad

#endif  // ILFO_AUTODIFF_OPTIM_H_
