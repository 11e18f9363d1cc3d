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

#ifndef ILFO_TRAINING_CONFIG_H_
#define ILFO_TRAINING_CONFIG_H_

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "ilfo/env/env.h"
#include "ilfo/models/models.h"

namespace ilfo::training {

enum class ReconstructionLoss { kSquared, kAbsolute };

// Every hyperparameter of a run. Serialized as JSON; unknown keys are
// rejected on load.
struct ExperimentConfig {
  // Environment.
  std::string env_name = "double-integrator";
  int horizon = 100;
  double dt = 0.05;

  // Teacher data. Generated from the scripted teacher on seeds
  // teacher_seed_base.. unless dataset_path is set.
  std::size_t n_teacher_trajectories = 700;
  std::uint64_t teacher_seed_base = 0;
  std::string dataset_path;

  // Schedule.
  int epochs_r = 150;
  int epochs_a = 10;
  double lr_reconstruction = 1e-3;
  double lr_policy_adversarial = 1e-5;
  double lr_discriminator = 1e-3;
  ReconstructionLoss reconstruction_loss = ReconstructionLoss::kSquared;
  std::size_t rollouts_per_epoch = 10;
  std::size_t batch_size = 64;
  std::size_t generator_batch_size = 16;
  double clip_norm = 1.0;
  // Std of Gaussian noise added to the agent's actions while collecting
  // generator training data (0 = pure on-policy).
  double exploration_noise = 0.3;
  std::uint64_t master_seed = 0;

  // Models.
  std::vector<std::size_t> policy_hidden = {64, 64, 64};
  std::vector<std::size_t> generator_hidden = {64, 64, 64};
  models::DiscriminatorConfig discriminator;

  // Seed layout for online play and evaluation.
  std::uint64_t online_seed_base = 1000000;
  std::uint64_t holdout_seed_base = 2000000;
  std::uint64_t probe_seed_base = 3000000;
  std::size_t holdout_rollouts = 2;
  std::size_t probe_seeds = 20;
  int probe_every = 1;
  std::uint64_t eval_seed_base = 0;
  std::size_t eval_seeds = 200;

  bool operator==(const ExperimentConfig&) const = default;
};

env::EnvSpec SpecFor(const ExperimentConfig& config);

// Human-readable list of violated constraints; empty when valid.
std::vector<std::string> Validate(const ExperimentConfig& config);
// Throws ConfigError listing every violation.
void ValidateOrThrow(const ExperimentConfig& config);

std::string ConfigToJson(const ExperimentConfig& config);
// Throws ConfigError for unknown keys or wrongly typed values and
// ParseError for malformed JSON. Missing keys keep their defaults.
ExperimentConfig ConfigFromJson(std::string_view text);

ExperimentConfig LoadConfig(const std::filesystem::path& path);
void SaveConfig(const ExperimentConfig& config, const std::filesystem::path& path);

// Seeds whose episodes the agent plays during training (stage-1 and
// stage-2 rollouts, generator hold-out rollouts, AER probes).
std::vector<std::uint64_t> OnlinePlaySeeds(const ExperimentConfig& config);
std::uint64_t OnlineSeed(const ExperimentConfig& config, int global_epoch,
                         std::size_t rollout);
std::uint64_t HoldoutSeed(const ExperimentConfig& config, int global_epoch,
                          std::size_t rollout);
std::vector<std::uint64_t> ProbeSeeds(const ExperimentConfig& config);

std::string_view LossName(ReconstructionLoss loss);

}  // namespace ilfo::training

#endif  // ILFO_TRAINING_CONFIG_H_
