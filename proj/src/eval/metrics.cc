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

#include "ilfo/eval/metrics.h"

#include <cmath>
#include <string>

#include "ilfo/errors.h"

namespace ilfo::eval {
AerStats SummarizeReturns(std::span<const double> returns) {
  if (returns.empty()) throw EmptyInputError("no returns");
  AerStats out;
  for (double r : returns) out.mean += r;
  out.mean /= static_cast<double>(returns.size());
  double var = 0.0;
  for (double r : returns) var += (r - out.mean) * (r - out.mean);
  out.std = std::sqrt(var / static_cast<double>(returns.size()));
  return out;
}

AerStats Aer(const env::Policy& policy, const env::EnvSpec& spec,
             std::span<const std::uint64_t> seeds) {
  return Aer([&policy](std::uint64_t) { return policy; }, spec, seeds);
}

AerStats Aer(const PolicyFactory& factory, const env::EnvSpec& spec,
             std::span<const std::uint64_t> seeds) {
  if (seeds.empty()) throw EmptyInputError("AER needs at least one seed");
  std::vector<double> returns;
  returns.reserve(seeds.size());
  for (std::uint64_t s : seeds) returns.push_back(env::EpisodeReturn(spec, factory(s), s));
  return SummarizeReturns(returns);
}

PolicyFactory RandomPolicyFactory(const env::EnvSpec& spec) {
  return [spec](std::uint64_t seed) { return env::RandomPolicy(spec, seed); };
}

double Performance(double aer_agent, double aer_random, double aer_teacher) {
  const double denom = aer_teacher - aer_random;
  if (denom == 0.0) throw DegenerateError("teacher and random AER coincide");
  return (aer_agent - aer_random) / denom;
}

double CoefficientOfVariation(double mean, double std) {
  if (mean == 0.0) throw DegenerateError("coefficient of variation of a zero mean");
  return std / std::fabs(mean);
}

void StateSet::Add(std::vector<double> state) { states_.push_back(std::move(state)); }

bool StateSet::Contains(std::span<const double> state) const {
  for (const auto& s : states_) {
    if (s.size() != state.size()) continue;
    bool same = true;
    for (std::size_t i = 0; i < s.size() && same; ++i) {
      same = std::fabs(s[i] - state[i]) <= tol_;
    }
    if (same) return true;
  }
  return false;
}

StateSet DatasetInitialStates(const data::Dataset& dataset, double tol) {
  StateSet out(tol);
  for (const auto& traj : dataset.trajectories) {
    if (!traj.states.empty()) out.Add(traj.states.front());
  }
  return out;
}

std::vector<std::uint64_t> DisjointEvalSeeds(const env::EnvSpec& spec,
                                             const data::Dataset& dataset,
                                             const StateSet& online_states, std::size_t n,
                                             std::uint64_t base, std::uint64_t budget) {
  if (n == 0) throw ContractError("need at least one evaluation seed");
  const StateSet training = DatasetInitialStates(dataset);
  std::vector<std::uint64_t> seeds;
  for (std::uint64_t k = 0; k < budget && seeds.size() < n; ++k) {
    const std::uint64_t candidate = base + k;
    const env::EnvState s = env::Reset(spec, candidate);
    if (training.Contains(s.vector) || online_states.Contains(s.vector)) continue;
    seeds.push_back(candidate);
  }
  if (seeds.size() < n) {
    throw InsufficientSeedsError("found " + std::to_string(seeds.size()) + " of " +
                                 std::to_string(n) + " disjoint seeds within " +
                                 std::to_string(budget) + " candidates");
  }
  return seeds;
}

}  // namespace ilfo::eval
