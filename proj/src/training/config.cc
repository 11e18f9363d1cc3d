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

#include "ilfo/training/config.h"

#include <fstream>
#include <iterator>
#include <set>

#include "ilfo/errors.h"
#include "json.hpp"

namespace ilfo::training {
namespace {

using nlohmann::ordered_json;

template <class T>
void Read(const ordered_json& j, const char* key, T& out,
          std::vector<std::string>& errors) {
  if (!j.contains(key)) return;
  try {
    out = j.at(key).get<T>();
  } catch (const nlohmann::json::exception&) {
    errors.push_back(std::string("'") + key + "' has the wrong type");
  }
}

}  // namespace

std::string_view LossName(ReconstructionLoss loss) {
  return loss == ReconstructionLoss::kSquared ? "squared" : "absolute";
}

env::EnvSpec SpecFor(const ExperimentConfig& config) {
  return env::MakeSpec(config.env_name, config.horizon, config.dt);
}

std::vector<std::string> Validate(const ExperimentConfig& c) {
  std::vector<std::string> v;
  try {
    SpecFor(c);
  } catch (const std::exception& e) {
    v.push_back(std::string("env: ") + e.what());
  }
  if (c.n_teacher_trajectories < 1 && c.dataset_path.empty())
    v.push_back("n_teacher_trajectories must be >= 1");
  if (c.epochs_r < 0) v.push_back("epochs_r must be >= 0");
  if (c.epochs_a < 0) v.push_back("epochs_a must be >= 0");
  if (c.epochs_a > c.epochs_r) v.push_back("epochs_a must be <= epochs_r");
  if (c.epochs_a > 10) v.push_back("epochs_a must be <= 10");
  if (!(c.lr_reconstruction >= 0.0)) v.push_back("lr_reconstruction must be >= 0");
  if (!(c.lr_policy_adversarial >= 0.0)) v.push_back("lr_policy_adversarial must be >= 0");
  if (!(c.lr_discriminator >= 0.0)) v.push_back("lr_discriminator must be >= 0");
  if (!(c.lr_policy_adversarial < c.lr_reconstruction))
    v.push_back("lr_policy_adversarial must be < lr_reconstruction");
  if (c.rollouts_per_epoch < 1) v.push_back("rollouts_per_epoch must be >= 1");
  if (c.batch_size < 1) v.push_back("batch_size must be >= 1");
  if (c.generator_batch_size < 1) v.push_back("generator_batch_size must be >= 1");
  if (!(c.clip_norm > 0.0)) v.push_back("clip_norm must be > 0");
  if (!(c.exploration_noise >= 0.0)) v.push_back("exploration_noise must be >= 0");
  if (c.policy_hidden.empty()) v.push_back("policy_hidden must not be empty");
  if (c.generator_hidden.empty()) v.push_back("generator_hidden must not be empty");
  for (std::size_t w : c.policy_hidden)
    if (w == 0) v.push_back("policy_hidden widths must be positive");
  for (std::size_t w : c.generator_hidden)
    if (w == 0) v.push_back("generator_hidden widths must be positive");
  if (c.discriminator.lstm_hidden == 0) v.push_back("lstm_hidden must be positive");
  if (c.discriminator.lstm_layers == 0) v.push_back("lstm_layers must be positive");
  if (c.discriminator.head_width == 0) v.push_back("head_width must be positive");
  if (!(c.discriminator.dropout >= 0.0 && c.discriminator.dropout < 1.0))
    v.push_back("dropout must be in [0, 1)");
  if (c.holdout_rollouts < 1) v.push_back("holdout_rollouts must be >= 1");
  if (c.probe_seeds < 1) v.push_back("probe_seeds must be >= 1");
  if (c.probe_every < 1) v.push_back("probe_every must be >= 1");
  if (c.eval_seeds < 1) v.push_back("eval_seeds must be >= 1");
  return v;
}

void ValidateOrThrow(const ExperimentConfig& config) {
  auto v = Validate(config);
  if (!v.empty()) throw ConfigError(std::move(v));
}

std::string ConfigToJson(const ExperimentConfig& c) {
  ordered_json j;
  j["env_name"] = c.env_name;
  j["horizon"] = c.horizon;
  j["dt"] = c.dt;
  j["n_teacher_trajectories"] = c.n_teacher_trajectories;
  j["teacher_seed_base"] = c.teacher_seed_base;
  j["dataset_path"] = c.dataset_path;
  j["epochs_r"] = c.epochs_r;
  j["epochs_a"] = c.epochs_a;
  j["lr_reconstruction"] = c.lr_reconstruction;
  j["lr_policy_adversarial"] = c.lr_policy_adversarial;
  j["lr_discriminator"] = c.lr_discriminator;
  j["reconstruction_loss"] = LossName(c.reconstruction_loss);
  j["rollouts_per_epoch"] = c.rollouts_per_epoch;
  j["batch_size"] = c.batch_size;
  j["generator_batch_size"] = c.generator_batch_size;
  j["clip_norm"] = c.clip_norm;
  j["exploration_noise"] = c.exploration_noise;
  j["master_seed"] = c.master_seed;
  j["policy_hidden"] = c.policy_hidden;
  j["generator_hidden"] = c.generator_hidden;
  j["lstm_hidden"] = c.discriminator.lstm_hidden;
  j["lstm_layers"] = c.discriminator.lstm_layers;
  j["head_width"] = c.discriminator.head_width;
  j["dropout"] = c.discriminator.dropout;
  j["online_seed_base"] = c.online_seed_base;
  j["holdout_seed_base"] = c.holdout_seed_base;
  j["probe_seed_base"] = c.probe_seed_base;
  j["holdout_rollouts"] = c.holdout_rollouts;
  j["probe_seeds"] = c.probe_seeds;
  j["probe_every"] = c.probe_every;
  j["eval_seed_base"] = c.eval_seed_base;
  j["eval_seeds"] = c.eval_seeds;
  return j.dump(2) + "\n";
}

ExperimentConfig ConfigFromJson(std::string_view text) {
  ordered_json j;
  try {
    j = ordered_json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError(std::string("config: ") + e.what(), 0, e.byte);
  }
  if (!j.is_object()) throw ConfigError({"config must be a JSON object"});

  static const std::set<std::string> kKnown = {
      "env_name", "horizon", "dt", "n_teacher_trajectories", "teacher_seed_base",
      "dataset_path", "epochs_r", "epochs_a", "lr_reconstruction",
      "lr_policy_adversarial", "lr_discriminator", "reconstruction_loss",
      "rollouts_per_epoch", "batch_size", "generator_batch_size", "clip_norm",
      "exploration_noise", "master_seed", "policy_hidden", "generator_hidden",
      "lstm_hidden", "lstm_layers", "head_width", "dropout", "online_seed_base",
      "holdout_seed_base", "probe_seed_base", "holdout_rollouts", "probe_seeds",
      "probe_every", "eval_seed_base", "eval_seeds"};
  std::vector<std::string> errors;
  for (const auto& [key, _] : j.items()) {
    if (!kKnown.contains(key)) errors.push_back("unknown key '" + key + "'");
  }

  ExperimentConfig c;
  Read(j, "env_name", c.env_name, errors);
  Read(j, "horizon", c.horizon, errors);
  Read(j, "dt", c.dt, errors);
  Read(j, "n_teacher_trajectories", c.n_teacher_trajectories, errors);
  Read(j, "teacher_seed_base", c.teacher_seed_base, errors);
  Read(j, "dataset_path", c.dataset_path, errors);
  Read(j, "epochs_r", c.epochs_r, errors);
  Read(j, "epochs_a", c.epochs_a, errors);
  Read(j, "lr_reconstruction", c.lr_reconstruction, errors);
  Read(j, "lr_policy_adversarial", c.lr_policy_adversarial, errors);
  Read(j, "lr_discriminator", c.lr_discriminator, errors);
  if (j.contains("reconstruction_loss")) {
    std::string loss;
    Read(j, "reconstruction_loss", loss, errors);
    if (loss == "squared") {
      c.reconstruction_loss = ReconstructionLoss::kSquared;
    } else if (loss == "absolute") {
      c.reconstruction_loss = ReconstructionLoss::kAbsolute;
    } else {
      errors.push_back("reconstruction_loss must be 'squared' or 'absolute'");
    }
  }
  Read(j, "rollouts_per_epoch", c.rollouts_per_epoch, errors);
  Read(j, "batch_size", c.batch_size, errors);
  Read(j, "generator_batch_size", c.generator_batch_size, errors);
  Read(j, "clip_norm", c.clip_norm, errors);
  Read(j, "exploration_noise", c.exploration_noise, errors);
  Read(j, "master_seed", c.master_seed, errors);
  Read(j, "policy_hidden", c.policy_hidden, errors);
  Read(j, "generator_hidden", c.generator_hidden, errors);
  Read(j, "lstm_hidden", c.discriminator.lstm_hidden, errors);
  Read(j, "lstm_layers", c.discriminator.lstm_layers, errors);
  Read(j, "head_width", c.discriminator.head_width, errors);
  Read(j, "dropout", c.discriminator.dropout, errors);
  Read(j, "online_seed_base", c.online_seed_base, errors);
  Read(j, "holdout_seed_base", c.holdout_seed_base, errors);
  Read(j, "probe_seed_base", c.probe_seed_base, errors);
  Read(j, "holdout_rollouts", c.holdout_rollouts, errors);
  Read(j, "probe_seeds", c.probe_seeds, errors);
  Read(j, "probe_every", c.probe_every, errors);
  Read(j, "eval_seed_base", c.eval_seed_base, errors);
  Read(j, "eval_seeds", c.eval_seeds, errors);
  if (!errors.empty()) throw ConfigError(std::move(errors));
  return c;
}

ExperimentConfig LoadConfig(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError("cannot open config " + path.string());
  std::string text((std::istreambuf_iterator<char>(in)),
                   std::istreambuf_iterator<char>());
  return ConfigFromJson(text);
}

void SaveConfig(const ExperimentConfig& config, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << ConfigToJson(config);
}

std::uint64_t OnlineSeed(const ExperimentConfig& c, int global_epoch,
                         std::size_t rollout) {
  return c.online_seed_base +
         static_cast<std::uint64_t>(global_epoch) * c.rollouts_per_epoch + rollout;
}

std::uint64_t HoldoutSeed(const ExperimentConfig& c, int global_epoch,
                          std::size_t rollout) {
  return c.holdout_seed_base +
         static_cast<std::uint64_t>(global_epoch) * c.holdout_rollouts + rollout;
}

std::vector<std::uint64_t> ProbeSeeds(const ExperimentConfig& c) {
  std::vector<std::uint64_t> seeds;
  for (std::size_t i = 0; i < c.probe_seeds; ++i) seeds.push_back(c.probe_seed_base + i);
  return seeds;
}

std::vector<std::uint64_t> OnlinePlaySeeds(const ExperimentConfig& c) {
  std::vector<std::uint64_t> seeds;
  const int epochs = c.epochs_r + c.epochs_a;
  for (int e = 0; e < epochs; ++e) {
    for (std::size_t r = 0; r < c.rollouts_per_epoch; ++r) seeds.push_back(OnlineSeed(c, e, r));
    for (std::size_t r = 0; r < c.holdout_rollouts; ++r) seeds.push_back(HoldoutSeed(c, e, r));
  }
  for (std::uint64_t s : ProbeSeeds(c)) seeds.push_back(s);
  return seeds;
}

}  // namespace ilfo::training
