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

#ifndef ILFO_EVAL_ORACLES_H_
#define ILFO_EVAL_ORACLES_H_

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "ilfo/autodiff/parameters.h"
#include "ilfo/data/dataset.h"
#include "ilfo/env/env.h"
#include "ilfo/models/models.h"
#include "ilfo/training/trainer.h"

namespace ilfo::eval {

// p_teacher / (p_teacher + p_agent). Throws DegenerateError if both are 0
// and ContractError for negative densities.
double OptimalDiscriminatorOracle(double p_teacher, double p_agent);

// Central differences of `loss` with respect to every component of every
// parameter in `params`; values are restored afterwards.
ad::GradientMap FiniteDifferenceGradient(const std::function<double()>& loss,
                                         ad::ParameterSet& params, double h);

struct BcSettings {
  std::vector<std::size_t> hidden = {64, 64, 64};
  double lr = 1e-3;
  int epochs = 10;
  std::size_t batch_size = 64;
  std::uint64_t seed = 0;
};

struct BcResult {
  models::PolicyNet policy;
  // Mean squared action error per epoch, measured before each step.
  std::vector<double> epoch_loss;
};

// Supervised regression of teacher actions on states. Reference only; the
// imitation method itself never sees actions. Throws MissingLabelsError
// if any trajectory lacks actions.
BcResult BcOracleTrain(const env::EnvSpec& spec, const data::Dataset& dataset,
                       const BcSettings& settings);

// Exact DoubleIntegrator2D transition for unclamped actions, as a graph op.
training::DynamicsFn AnalyticDoubleIntegrator(const env::EnvSpec& spec);

// Same, on plain vectors.
std::vector<double> DoubleIntegratorNext(const env::EnvSpec& spec, std::span<const double> s,
                                         std::span<const double> a);

}  // namespace ilfo::eval

#endif  // ILFO_EVAL_ORACLES_H_
