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

#ifndef ILFO_TRAINING_TRAINER_H_
#define ILFO_TRAINING_TRAINER_H_

#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <vector>

#include "ilfo/autodiff/checkpoint.h"
#include "ilfo/autodiff/graph.h"
#include "ilfo/autodiff/optim.h"
#include "ilfo/data/dataset.h"
#include "ilfo/env/env.h"
#include "ilfo/models/models.h"
#include "ilfo/random.h"
#include "ilfo/training/config.h"
#include "ilfo/training/log.h"

namespace ilfo::training {

// The three networks plus their optimizer state.
struct Models {
  models::PolicyNet policy;
  models::GeneratorNet generator;
  models::DiscriminatorNet discriminator;
  ad::AdamState policy_adam;
  ad::AdamState generator_adam;
  ad::AdamState discriminator_adam;

  // Fresh initialization; each net draws from its own stream of
  // config.master_seed.
  static Models Create(const ExperimentConfig& config, const env::EnvSpec& spec);

  // Parameters under "policy.", "generator.", "discriminator." plus the Adam
  // state of each net.
  ad::Checkpoint ToCheckpoint() const;
  void Restore(const ad::Checkpoint& ckpt);
};

// Differentiable next-state model (states B x n, actions B x m) -> B x n.
using DynamicsFn = std::function<ad::Var(ad::Graph&, ad::Var, ad::Var)>;

// Per-row reconstruction loss sum_k L(target_k - prediction_k), averaged over
// rows: 1x1.
ad::Var ReconstructionLossVar(ad::Var target, ad::Var prediction, ReconstructionLoss loss);

// One pass of the policy half of the reconstruction stage: for every
// minibatch of teacher pairs, theta takes an Adam step on
// L(s', G(s, pi(s))). Gradients flow through G into pi. Returns the mean
// per-pair loss measured before each step.
double ReconstructionPolicyEpoch(models::PolicyNet& policy, const DynamicsFn& dynamics,
                                 const std::vector<data::TransitionPair>& teacher_pairs,
                                 double lr, std::size_t batch_size, ReconstructionLoss loss,
                                 ad::AdamState& adam, CounterRng& shuffle_rng);

// Same with G = `generator`, frozen for the duration. Throws
// FrozenViolationError if phi changes.
double ReconstructionPolicyEpoch(models::PolicyNet& policy, models::GeneratorNet& generator,
                                 const std::vector<data::TransitionPair>& teacher_pairs,
                                 double lr, std::size_t batch_size, ReconstructionLoss loss,
                                 ad::AdamState& adam, CounterRng& shuffle_rng);

// Agent transition observed in the environment.
struct AgentTransition {
  std::vector<double> s;
  std::vector<double> a;
  std::vector<double> s_next;
};

// Rolls out the policy on `seeds` and returns every transition. With
// noise_std > 0 Gaussian noise (stream `noise_rng`) perturbs the executed
// action, which is clipped to [-1, 1] and recorded as executed.
std::vector<AgentTransition> CollectAgentTransitions(const env::EnvSpec& spec,
                                                     const models::PolicyNet& policy,
                                                     const std::vector<std::uint64_t>& seeds,
                                                     double noise_std, CounterRng* noise_rng);

// Mean per-transition loss L(s', G(s, a)) without updating anything.
double GeneratorLoss(const models::GeneratorNet& generator,
                     const std::vector<AgentTransition>& transitions, ReconstructionLoss loss);

struct GeneratorEpochResult {
  double mean_loss = 0.0;
  std::vector<AgentTransition> transitions;
};

// The generator half: collect agent rollouts on `seeds` with pi frozen, then
// Adam-update phi on L(T(s, a), G(s, a)) with environment-observed targets.
// Throws FrozenViolationError if theta changes.
GeneratorEpochResult ReconstructionGeneratorEpoch(
    models::GeneratorNet& generator, models::PolicyNet& policy, const env::EnvSpec& spec,
    const std::vector<std::uint64_t>& seeds, double lr, std::size_t batch_size,
    ReconstructionLoss loss, ad::AdamState& adam, CounterRng& shuffle_rng,
    double noise_std = 0.0, CounterRng* noise_rng = nullptr);

// |s_i - G(s_i, pi(s_i))| for every visited state s_0..s_{T-1} (rows of
// `visited`), as a differentiable T x n node.
ad::Var AgentDeltas(ad::Graph& g, const models::PolicyNet& policy,
                    const models::GeneratorNet& generator, const ad::Tensor& visited);
ad::Var AgentDeltas(ad::Graph& g, const models::PolicyNet& policy, const DynamicsFn& dynamics,
                    const ad::Tensor& visited);

// Rolls pi out in the real environment and returns the generator-based
// delta sequence over the visited states.
data::DeltaSequence ComputeAgentDeltaSequence(const models::PolicyNet& policy,
                                              const models::GeneratorNet& generator,
                                              const env::EnvSpec& spec, std::uint64_t seed);

struct AdversarialSettings {
  double lr_policy = 1e-5;
  double lr_discriminator = 1e-3;
  double clip_norm = 1.0;
};

struct AdversarialEpochResult {
  // Mean binary cross-entropy of the discriminator steps.
  double discriminator_loss = 0.0;
  // Mean log D over the agent sequences (maximized by the policy).
  double policy_objective = 0.0;
  std::vector<data::Trajectory> agent_rollouts;
};

// One adversarial epoch with G frozen. For each agent rollout (on
// `agent_seeds`) and a teacher trajectory drawn from `teacher`:
//   1. omega: Adam step on -[log D(dT) + log(1 - D(dA))] (dropout on);
//   2. theta: plain gradient step on -log D(dA) with D in eval mode,
//      gradients clipped to clip_norm and scaled by lr_policy, so every
//      step moves theta by at most lr_policy * clip_norm.
AdversarialEpochResult AdversarialEpoch(models::PolicyNet& policy,
                                        models::GeneratorNet& generator,
                                        models::DiscriminatorNet& discriminator,
                                        ad::AdamState& discriminator_adam,
                                        const data::Dataset& teacher, const env::EnvSpec& spec,
                                        const std::vector<std::uint64_t>& agent_seeds,
                                        const AdversarialSettings& settings, CounterRng& rng);

// Mean undiscounted return of `policy` over `seeds`.
double ProbeAer(const models::PolicyNet& policy, const env::EnvSpec& spec,
                const std::vector<std::uint64_t>& seeds);

using EpochCallback = std::function<void(const EpochRecord&)>;

// Stage 1: epochs_r alternations of a policy epoch (G frozen) and a
// generator epoch (pi frozen). Throws NumericError on a non-finite loss.
TrainingLog RunReconstructionStage(const ExperimentConfig& config, const env::EnvSpec& spec,
                                   Models& models, const data::Dataset& teacher,
                                   const EpochCallback& on_epoch = {});

// Stage 2: epochs_a adversarial epochs with G frozen. Epoch numbering
// continues from `first_epoch`.
TrainingLog RunAdversarialStage(const ExperimentConfig& config, const env::EnvSpec& spec,
                                Models& models, const data::Dataset& teacher, int first_epoch,
                                const EpochCallback& on_epoch = {});

struct TrainOptions {
  // When set, stage1.ckpt / stage2.ckpt are written there.
  std::optional<std::filesystem::path> run_dir;
  bool stage1_only = false;
  // Overrides the config's teacher data source.
  const data::Dataset* dataset = nullptr;
  EpochCallback on_epoch;
};

struct TrainResult {
  Models models;
  TrainingLog log;
  ad::Checkpoint stage1;
  std::optional<ad::Checkpoint> stage2;
};

// The teacher dataset described by the config.
data::Dataset TeacherDatasetFor(const ExperimentConfig& config);

// Full pipeline: teacher data, stage 1, checkpoint, stage 2, checkpoint.
// Deterministic given the config.
TrainResult Train(const ExperimentConfig& config, const TrainOptions& options = {});

}  // namespace ilfo::training

#endif  // ILFO_TRAINING_TRAINER_H_
