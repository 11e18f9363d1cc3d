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

#ifndef ILFO_MODELS_MODELS_H_
#define ILFO_MODELS_MODELS_H_

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "ilfo/autodiff/graph.h"
#include "ilfo/autodiff/parameters.h"
#include "ilfo/data/dataset.h"
#include "ilfo/env/env.h"
#include "ilfo/random.h"

namespace ilfo::models {

// Stack of affine layers "<prefix>.fc<i>.{weight,bias}" with weight
// in x out, bias 1 x out, initialized U(-1/sqrt(fan_in), 1/sqrt(fan_in)).
class Mlp {
 public:
  enum class Output { kTanh, kLinear };

  Mlp(std::string prefix, std::vector<std::size_t> widths, Output output,
      std::uint64_t seed);

  // rows of inputs -> rows of outputs; tanh on every hidden layer.
  ad::Var Forward(ad::Graph& g, ad::Var x) const;
  // Single-row evaluation without building a graph.
  std::vector<double> Apply(std::span<const double> x) const;

  // Zeroes the last layer's weight and bias.
  void ZeroOutputLayer();

  ad::ParameterSet& params() { return params_; }
  const ad::ParameterSet& params() const { return params_; }
  const std::vector<std::size_t>& widths() const { return widths_; }

 private:
  std::string WeightName(std::size_t layer) const;
  std::string BiasName(std::size_t layer) const;

  std::string prefix_;
  std::vector<std::size_t> widths_;
  Output output_;
  ad::ParameterSet params_;
};

// pi_theta: state -> action in (-1, 1)^m, tanh on every layer.
class PolicyNet {
 public:
  PolicyNet(std::size_t state_dim, std::size_t action_dim,
            std::vector<std::size_t> hidden, std::uint64_t seed);

  ad::Var Forward(ad::Graph& g, ad::Var states) const;
  std::vector<double> Act(std::span<const double> state) const;
  // Refers to *this; the net must outlive the returned policy.
  env::Policy AsPolicy() const;

  std::size_t state_dim() const { return state_dim_; }
  std::size_t action_dim() const { return action_dim_; }
  ad::ParameterSet& params() { return mlp_.params(); }
  const ad::ParameterSet& params() const { return mlp_.params(); }
  Mlp& mlp() { return mlp_; }

 private:
  std::size_t state_dim_;
  std::size_t action_dim_;
  Mlp mlp_;
};

// G_phi: (state, action) -> predicted next state, linear output head.
class GeneratorNet {
 public:
  GeneratorNet(std::size_t state_dim, std::size_t action_dim,
               std::vector<std::size_t> hidden, std::uint64_t seed);

  ad::Var Forward(ad::Graph& g, ad::Var states, ad::Var actions) const;
  std::vector<double> Predict(std::span<const double> state,
                              std::span<const double> action) const;

  std::size_t state_dim() const { return state_dim_; }
  std::size_t action_dim() const { return action_dim_; }
  ad::ParameterSet& params() { return mlp_.params(); }
  const ad::ParameterSet& params() const { return mlp_.params(); }
  Mlp& mlp() { return mlp_; }

 private:
  std::size_t state_dim_;
  std::size_t action_dim_;
  Mlp mlp_;
};

struct DiscriminatorConfig {
  std::size_t lstm_hidden = 32;
  std::size_t lstm_layers = 1;
  std::size_t head_width = 64;
  double dropout = 0.5;

  bool operator==(const DiscriminatorConfig&) const = default;
};

// D_omega: delta sequence -> probability that it came from the teacher.
// A stacked LSTM encodes the sequence; its last hidden state goes through
// affine -> leaky-relu -> dropout -> affine -> sigmoid.
class DiscriminatorNet {
 public:
  DiscriminatorNet(std::size_t delta_dim, DiscriminatorConfig config,
                   std::uint64_t seed);

  // `deltas` is T x delta_dim with T >= 1. Returns a 1x1 probability.
  // In train mode dropout masks are drawn from `rng`, which must be set.
  ad::Var Forward(ad::Graph& g, ad::Var deltas, bool train_mode,
                  CounterRng* rng) const;
  double Probability(const data::DeltaSequence& seq, bool train_mode,
                     CounterRng* rng) const;

  // Last LSTM hidden state (1 x H), before the head.
  ad::Var Encode(ad::Graph& g, ad::Var deltas) const;

  std::size_t delta_dim() const { return delta_dim_; }
  const DiscriminatorConfig& config() const { return config_; }
  ad::ParameterSet& params() { return params_; }
  const ad::ParameterSet& params() const { return params_; }

 private:
  std::size_t delta_dim_;
  DiscriminatorConfig config_;
  ad::ParameterSet params_;
};

ad::Tensor ToTensor(const data::DeltaSequence& seq);

// Marks every entry of `target` non-trainable and records a hash of its
// values. Release() verifies the hash and restores the previous flags.
class FreezeGuard {
 public:
  explicit FreezeGuard(ad::ParameterSet& target);
  FreezeGuard(FreezeGuard&& other) noexcept;
  FreezeGuard(const FreezeGuard&) = delete;
  FreezeGuard& operator=(const FreezeGuard&) = delete;
  FreezeGuard& operator=(FreezeGuard&&) = delete;
  // Restores flags without verification if Release() was never called.
  ~FreezeGuard();

  // Throws FrozenViolationError if the values changed since the freeze.
  void Verify() const;
  // Restores the flags, then verifies.
  void Release();

  std::uint64_t snapshot() const { return snapshot_; }

 private:
  void RestoreFlags();

  ad::ParameterSet* target_;
  std::uint64_t snapshot_;
  std::vector<bool> flags_;
  bool released_ = false;
};

inline FreezeGuard Freeze(ad::ParameterSet& params) { return FreezeGuard(params); }

}  // namespace ilfo::models

#endif  // ILFO_MODELS_MODELS_H_
