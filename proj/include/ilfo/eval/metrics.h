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

#ifndef ILFO_EVAL_METRICS_H_
#define ILFO_EVAL_METRICS_H_

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "ilfo/data/dataset.h"
#include "ilfo/env/env.h"

namespace ilfo::eval {

struct AerStats {
  double mean = 0.0;
  double std = 0.0;  // population standard deviation
};

// Mean and population std of per-episode returns (non-empty).
AerStats SummarizeReturns(std::span<const double> returns);

// Builds the policy for one episode; lets stateful policies restart per seed.
using PolicyFactory = std::function<env::Policy(std::uint64_t seed)>;

// Undiscounted episode returns averaged over `seeds` (non-empty).
AerStats Aer(const env::Policy& policy, const env::EnvSpec& spec,
             std::span<const std::uint64_t> seeds);
AerStats Aer(const PolicyFactory& factory, const env::EnvSpec& spec,
             std::span<const std::uint64_t> seeds);

// Uniform random actions, one fresh stream per episode seed.
PolicyFactory RandomPolicyFactory(const env::EnvSpec& spec);

// (agent - random) / (teacher - random). Throws DegenerateError when the two
// baselines coincide.
double Performance(double aer_agent, double aer_random, double aer_teacher);

// std / |mean|. Throws DegenerateError for mean == 0.
double CoefficientOfVariation(double mean, double std);

// Initial states seen during training, matched componentwise within `tol`.
class StateSet {
 public:
  explicit StateSet(double tol = 1e-9) : tol_(tol) {}

  void Add(std::vector<double> state);
  bool Contains(std::span<const double> state) const;
  std::size_t size() const { return states_.size(); }

 private:
  double tol_;
  std::vector<std::vector<double>> states_;
};

// First state of every dataset trajectory.
StateSet DatasetInitialStates(const data::Dataset& dataset, double tol = 1e-9);

// The first `n` seeds >= `base` whose reset state is neither in `excluded`
// nor the first state of any dataset trajectory. Throws
// InsufficientSeedsError if `budget` candidates do not suffice.
std::vector<std::uint64_t> DisjointEvalSeeds(const env::EnvSpec& spec,
                                             const data::Dataset& dataset,
                                             const StateSet& online_states, std::size_t n,
                                             std::uint64_t base = 0,
                                             std::uint64_t budget = 1000000);

}  // namespace ilfo::eval

#endif  // ILFO_EVAL_METRICS_H_
