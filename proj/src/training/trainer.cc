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

#include "ilfo/training/trainer.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "ilfo/errors.h"

namespace ilfo::training {
namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

constexpr int kUnknownEpoch = -1;

void CheckFinite(double v, const char* what) {
  if (!std::isfinite(v)) throw NumericError(std::string("non-finite ") + what, kUnknownEpoch);
}

NumericError AtEpoch(const NumericError& err, int epoch) {
  if (err.epoch() != kUnknownEpoch) return err;
  std::string what = err.what();
  what.erase(what.rfind(" at epoch"));
  return NumericError(what, epoch);
}

// Rows `order[begin, begin + count)` of `rows` as a count x dim tensor.
template <class Get>
ad::Tensor GatherRows(const std::vector<std::size_t>& order, std::size_t begin,
                      std::size_t count, std::size_t dim, Get get) {
  ad::Tensor t({count, dim});
  for (std::size_t r = 0; r < count; ++r) {
    const std::vector<double>& src = get(order[begin + r]);
    std::copy(src.begin(), src.end(), t.values().begin() + static_cast<std::ptrdiff_t>(r * dim));
  }
  return t;
}

ad::Tensor VisitedStates(const data::Trajectory& traj) {
  std::vector<std::vector<double>> rows(traj.states.begin(), traj.states.end() - 1);
  return ad::Tensor::FromRows(rows);
}

std::vector<AgentTransition> TransitionsOf(const std::vector<data::Trajectory>& rollouts) {
  std::vector<AgentTransition> out;
  for (const auto& traj : rollouts) {
    for (std::size_t i = 0; i + 1 < traj.states.size(); ++i) {
      out.push_back({traj.states[i], (*traj.actions)[i], traj.states[i + 1]});
    }
  }
  return out;
}

ad::GradientMap Restrict(const ad::GradientMap& grads, const ad::ParameterSet& params) {
  ad::GradientMap out;
  for (const auto& n : params.names()) {
    if (auto it = grads.find(n); it != grads.end()) out.emplace(n, it->second);
  }
  return out;
}

}  // namespace

// ---- Models -----------------------------------------------------------------

Models Models::Create(const ExperimentConfig& config, const env::EnvSpec& spec) {
  return Models{
      models::PolicyNet(spec.state_dim, spec.action_dim, config.policy_hidden,
                        config.master_seed),
      models::GeneratorNet(spec.state_dim, spec.action_dim, config.generator_hidden,
                           config.master_seed),
      models::DiscriminatorNet(spec.state_dim, config.discriminator, config.master_seed),
      {}, {}, {}};
}

ad::Checkpoint Models::ToCheckpoint() const {
  ad::Checkpoint ckpt;
  ad::AppendParameters(ckpt, policy.params());
  ad::AppendParameters(ckpt, generator.params());
  ad::AppendParameters(ckpt, discriminator.params());
  ad::AppendAdam(ckpt, policy.params(), policy_adam);
  ad::AppendAdam(ckpt, generator.params(), generator_adam);
  ad::AppendAdam(ckpt, discriminator.params(), discriminator_adam);
  return ckpt;
}

void Models::Restore(const ad::Checkpoint& ckpt) {
  ad::RestoreParameters(ckpt, policy.params());
  ad::RestoreParameters(ckpt, generator.params());
  ad::RestoreParameters(ckpt, discriminator.params());
  ad::RestoreAdam(ckpt, policy.params(), policy_adam);
  ad::RestoreAdam(ckpt, generator.params(), generator_adam);
  ad::RestoreAdam(ckpt, discriminator.params(), discriminator_adam);
}

// ---- reconstruction stage ---------------------------------------------------

ad::Var ReconstructionLossVar(ad::Var target, ad::Var prediction, ReconstructionLoss loss) {
  ad::Var diff = target - prediction;
  ad::Var per_elem = loss == ReconstructionLoss::kSquared ? ad::Square(diff) : ad::Abs(diff);
  const double rows = static_cast<double>(target.shape().rows);
  return ad::Scale(ad::Sum(per_elem), 1.0 / rows);
}

double ReconstructionPolicyEpoch(models::PolicyNet& policy, const DynamicsFn& dynamics,
                                 const std::vector<data::TransitionPair>& teacher_pairs,
                                 double lr, std::size_t batch_size, ReconstructionLoss loss,
                                 ad::AdamState& adam, CounterRng& shuffle_rng) {
  if (teacher_pairs.empty()) throw EmptyInputError("no teacher transition pairs");
  if (batch_size == 0) throw ContractError("batch_size must be >= 1");
  const std::size_t n = teacher_pairs.size();
  const std::size_t dim = policy.state_dim();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  shuffle_rng.Shuffle(order);

  double total = 0.0;
  for (std::size_t begin = 0; begin < n; begin += batch_size) {
    const std::size_t count = std::min(batch_size, n - begin);
    ad::Graph g;
    ad::Var s = g.Constant(GatherRows(order, begin, count, dim,
                                      [&](std::size_t i) -> const std::vector<double>& {
                                        return teacher_pairs[i].s;
                                      }));
    ad::Var s_next = g.Constant(GatherRows(order, begin, count, dim,
                                           [&](std::size_t i) -> const std::vector<double>& {
                                             return teacher_pairs[i].s_next;
                                           }));
    ad::Var predicted = dynamics(g, s, policy.Forward(g, s));
    ad::Var l = ReconstructionLossVar(s_next, predicted, loss);
    const double value = l.value().item();
    CheckFinite(value, "policy reconstruction loss");
    total += value * static_cast<double>(count);
    g.Backward(l);
    ad::AdamStep(policy.params(), Restrict(g.ParameterGradients(), policy.params()), adam, lr);
  }
  return total / static_cast<double>(n);
}

double ReconstructionPolicyEpoch(models::PolicyNet& policy, models::GeneratorNet& generator,
                                 const std::vector<data::TransitionPair>& teacher_pairs,
                                 double lr, std::size_t batch_size, ReconstructionLoss loss,
                                 ad::AdamState& adam, CounterRng& shuffle_rng) {
  models::FreezeGuard guard = models::Freeze(generator.params());
  const DynamicsFn dynamics = [&generator](ad::Graph& g, ad::Var s, ad::Var a) {
    return generator.Forward(g, s, a);
  };
  const double mean = ReconstructionPolicyEpoch(policy, dynamics, teacher_pairs, lr,
                                                batch_size, loss, adam, shuffle_rng);
  guard.Release();
  return mean;
}

std::vector<AgentTransition> CollectAgentTransitions(const env::EnvSpec& spec,
                                                     const models::PolicyNet& policy,
                                                     const std::vector<std::uint64_t>& seeds,
                                                     double noise_std, CounterRng* noise_rng) {
  if (noise_std > 0.0 && noise_rng == nullptr) {
    throw ContractError("exploration noise needs an rng stream");
  }
  std::vector<AgentTransition> out;
  for (std::uint64_t seed : seeds) {
    env::EnvState s = env::Reset(spec, seed);
    for (;;) {
      std::vector<double> a = policy.Act(s.vector);
      if (noise_std > 0.0) {
        for (double& x : a) x = std::clamp(x + noise_std * noise_rng->Normal(), -1.0, 1.0);
      }
      env::StepResult r = env::Step(spec, s, a);
      out.push_back({s.vector, std::move(a), r.state.vector});
      s = std::move(r.state);
      if (r.done) break;
    }
  }
  return out;
}

namespace {

double GeneratorBatchLoss(const models::GeneratorNet& generator,
                          const std::vector<AgentTransition>& transitions,
                          const std::vector<std::size_t>& order, std::size_t begin,
                          std::size_t count, ReconstructionLoss loss, ad::Graph& g,
                          ad::Var* out) {
  const std::size_t n = generator.state_dim();
  const std::size_t m = generator.action_dim();
  ad::Var s = g.Constant(GatherRows(order, begin, count, n,
                                    [&](std::size_t i) -> const std::vector<double>& {
                                      return transitions[i].s;
                                    }));
  ad::Var a = g.Constant(GatherRows(order, begin, count, m,
                                    [&](std::size_t i) -> const std::vector<double>& {
                                      return transitions[i].a;
                                    }));
  ad::Var s_next = g.Constant(GatherRows(order, begin, count, n,
                                         [&](std::size_t i) -> const std::vector<double>& {
                                           return transitions[i].s_next;
                                         }));
  *out = ReconstructionLossVar(s_next, generator.Forward(g, s, a), loss);
  return out->value().item();
}

}  // namespace

double GeneratorLoss(const models::GeneratorNet& generator,
                     const std::vector<AgentTransition>& transitions, ReconstructionLoss loss) {
  if (transitions.empty()) throw EmptyInputError("no transitions");
  std::vector<std::size_t> order(transitions.size());
  std::iota(order.begin(), order.end(), 0);
  ad::Graph g;
  ad::Var l;
  return GeneratorBatchLoss(generator, transitions, order, 0, order.size(), loss, g, &l);
}

GeneratorEpochResult ReconstructionGeneratorEpoch(
    models::GeneratorNet& generator, models::PolicyNet& policy, const env::EnvSpec& spec,
    const std::vector<std::uint64_t>& seeds, double lr, std::size_t batch_size,
    ReconstructionLoss loss, ad::AdamState& adam, CounterRng& shuffle_rng, double noise_std,
    CounterRng* noise_rng) {
  if (batch_size == 0) throw ContractError("batch_size must be >= 1");
  models::FreezeGuard guard = models::Freeze(policy.params());
  GeneratorEpochResult result;
  result.transitions = CollectAgentTransitions(spec, policy, seeds, noise_std, noise_rng);
  const std::size_t n = result.transitions.size();
  if (n == 0) throw EmptyInputError("agent rollouts produced no transitions");
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  shuffle_rng.Shuffle(order);

  double total = 0.0;
  for (std::size_t begin = 0; begin < n; begin += batch_size) {
    const std::size_t count = std::min(batch_size, n - begin);
    ad::Graph g;
    ad::Var l;
    const double value =
        GeneratorBatchLoss(generator, result.transitions, order, begin, count, loss, g, &l);
    CheckFinite(value, "generator loss");
    total += value * static_cast<double>(count);
    g.Backward(l);
    ad::AdamStep(generator.params(), Restrict(g.ParameterGradients(), generator.params()),
                 adam, lr);
  }
  result.mean_loss = total / static_cast<double>(n);
  guard.Release();
  return result;
}

// ---- adversarial stage ------------------------------------------------------

ad::Var AgentDeltas(ad::Graph& g, const models::PolicyNet& policy, const DynamicsFn& dynamics,
                    const ad::Tensor& visited) {
  ad::Var s = g.Constant(visited);
  return ad::Abs(s - dynamics(g, s, policy.Forward(g, s)));
}

ad::Var AgentDeltas(ad::Graph& g, const models::PolicyNet& policy,
                    const models::GeneratorNet& generator, const ad::Tensor& visited) {
  ad::Var s = g.Constant(visited);
  return ad::Abs(s - generator.Forward(g, s, policy.Forward(g, s)));
}

data::DeltaSequence ComputeAgentDeltaSequence(const models::PolicyNet& policy,
                                              const models::GeneratorNet& generator,
                                              const env::EnvSpec& spec, std::uint64_t seed) {
  const data::Trajectory traj = env::Rollout(spec, policy.AsPolicy(), seed, false);
  ad::Graph g;
  const ad::Tensor& d = AgentDeltas(g, policy, generator, VisitedStates(traj)).value();
  data::DeltaSequence seq;
  seq.source = data::DeltaSource::kAgent;
  for (std::size_t r = 0; r < d.rows(); ++r) seq.deltas.push_back(d.RowVector(r));
  return seq;
}

AdversarialEpochResult AdversarialEpoch(models::PolicyNet& policy,
                                        models::GeneratorNet& generator,
                                        models::DiscriminatorNet& discriminator,
                                        ad::AdamState& discriminator_adam,
                                        const data::Dataset& teacher, const env::EnvSpec& spec,
                                        const std::vector<std::uint64_t>& agent_seeds,
                                        const AdversarialSettings& settings, CounterRng& rng) {
  std::vector<std::size_t> eligible;
  for (std::size_t i = 0; i < teacher.trajectories.size(); ++i) {
    if (teacher.trajectories[i].states.size() >= 2) eligible.push_back(i);
  }
  if (eligible.empty()) throw EmptyInputError("no teacher trajectory has two states");
  if (agent_seeds.empty()) throw EmptyInputError("no agent seeds");

  models::FreezeGuard guard = models::Freeze(generator.params());
  AdversarialEpochResult result;
  double d_total = 0.0;
  double objective_total = 0.0;
  rng.Shuffle(eligible);

  for (std::size_t i = 0; i < agent_seeds.size(); ++i) {
    data::Trajectory rollout = env::Rollout(spec, policy.AsPolicy(), agent_seeds[i], true);
    const ad::Tensor visited = VisitedStates(rollout);
    const ad::Tensor teacher_deltas = models::ToTensor(
        data::TeacherDeltaSequence(teacher.trajectories[eligible[i % eligible.size()]]));

    // Discriminator step: teacher label 1, agent label 0.
    {
      ad::Tensor agent_deltas;
      {
        ad::Graph g0;
        agent_deltas = AgentDeltas(g0, policy, generator, visited).value();
      }
      ad::Graph g;
      ad::Var p_teacher = discriminator.Forward(g, g.Constant(teacher_deltas), true, &rng);
      ad::Var p_agent = discriminator.Forward(g, g.Constant(agent_deltas), true, &rng);
      ad::Var loss = -(ad::Log(p_teacher) + ad::Log(1.0 - p_agent));
      const double value = loss.value().item();
      CheckFinite(value, "discriminator loss");
      d_total += 0.5 * value;
      g.Backward(loss);
      ad::AdamStep(discriminator.params(),
                   Restrict(g.ParameterGradients(), discriminator.params()),
                   discriminator_adam, settings.lr_discriminator);
    }

    // Policy step through the frozen generator.
    {
      ad::Graph g;
      ad::Var deltas = AgentDeltas(g, policy, generator, visited);
      ad::Var log_p = ad::Log(discriminator.Forward(g, deltas, false, nullptr));
      const double objective = log_p.value().item();
      CheckFinite(objective, "policy adversarial objective");
      objective_total += objective;
      ad::Var loss = -log_p;
      g.Backward(loss);
      ad::GradientMap grads = ad::ClipGradients(
          Restrict(g.ParameterGradients(), policy.params()), settings.clip_norm);
      ad::SgdStep(policy.params(), grads, settings.lr_policy);
    }
    result.agent_rollouts.push_back(std::move(rollout));
  }
  const double n = static_cast<double>(agent_seeds.size());
  result.discriminator_loss = d_total / n;
  result.policy_objective = objective_total / n;
  guard.Release();
  return result;
}

double ProbeAer(const models::PolicyNet& policy, const env::EnvSpec& spec,
                const std::vector<std::uint64_t>& seeds) {
  if (seeds.empty()) throw EmptyInputError("no probe seeds");
  double total = 0.0;
  const env::Policy pi = policy.AsPolicy();
  for (std::uint64_t s : seeds) total += env::EpisodeReturn(spec, pi, s);
  return total / static_cast<double>(seeds.size());
}

// ---- stages -----------------------------------------------------------------

namespace {

std::vector<std::uint64_t> EpochSeeds(const ExperimentConfig& config, int global_epoch,
                                      bool holdout) {
  std::vector<std::uint64_t> seeds;
  const std::size_t n = holdout ? config.holdout_rollouts : config.rollouts_per_epoch;
  for (std::size_t r = 0; r < n; ++r) {
    seeds.push_back(holdout ? HoldoutSeed(config, global_epoch, r)
                            : OnlineSeed(config, global_epoch, r));
  }
  return seeds;
}

double MaybeProbe(const ExperimentConfig& config, const env::EnvSpec& spec,
                  const models::PolicyNet& policy, int epoch_in_stage, int stage_epochs) {
  const bool due = (epoch_in_stage + 1) % config.probe_every == 0 ||
                   epoch_in_stage + 1 == stage_epochs;
  return due ? ProbeAer(policy, spec, ProbeSeeds(config)) : kNaN;
}

}  // namespace

TrainingLog RunReconstructionStage(const ExperimentConfig& config, const env::EnvSpec& spec,
                                   Models& models, const data::Dataset& teacher,
                                   const EpochCallback& on_epoch) {
  TrainingLog log;
  if (config.epochs_r <= 0) return log;
  const data::TransitionPairs pairs = data::ExtractTransitionPairs(teacher);
  const CounterRng policy_shuffle(config.master_seed, "shuffle.policy");
  const CounterRng generator_shuffle(config.master_seed, "shuffle.generator");
  const CounterRng exploration(config.master_seed, "exploration");

  for (int e = 0; e < config.epochs_r; ++e) {
    EpochRecord rec;
    rec.epoch = e;
    rec.stage = Stage::kReconstruction;
    rec.discriminator_loss = kNaN;
    try {
      CounterRng ps = policy_shuffle.Fork(static_cast<std::uint64_t>(e));
      rec.policy_loss = ReconstructionPolicyEpoch(
          models.policy, models.generator, pairs.pairs, config.lr_reconstruction,
          config.batch_size, config.reconstruction_loss, models.policy_adam, ps);

      CounterRng gs = generator_shuffle.Fork(static_cast<std::uint64_t>(e));
      CounterRng noise = exploration.Fork(static_cast<std::uint64_t>(e));
      GeneratorEpochResult gen = ReconstructionGeneratorEpoch(
          models.generator, models.policy, spec, EpochSeeds(config, e, false),
          config.lr_reconstruction, config.generator_batch_size, config.reconstruction_loss,
          models.generator_adam, gs, config.exploration_noise, &noise);
      rec.gen_loss_train = gen.mean_loss;

      const auto holdout = CollectAgentTransitions(spec, models.policy,
                                                   EpochSeeds(config, e, true), 0.0, nullptr);
      rec.gen_loss_eval = GeneratorLoss(models.generator, holdout, config.reconstruction_loss);
      CheckFinite(rec.gen_loss_eval, "generator hold-out loss");
      rec.aer_probe = MaybeProbe(config, spec, models.policy, e, config.epochs_r);
    } catch (const NumericError& err) {
      throw AtEpoch(err, e);
    }
    log.records.push_back(rec);
    if (on_epoch) on_epoch(rec);
  }
  return log;
}

TrainingLog RunAdversarialStage(const ExperimentConfig& config, const env::EnvSpec& spec,
                                Models& models, const data::Dataset& teacher, int first_epoch,
                                const EpochCallback& on_epoch) {
  TrainingLog log;
  const CounterRng stream(config.master_seed, "adversarial");
  const AdversarialSettings settings{config.lr_policy_adversarial, config.lr_discriminator,
                                     config.clip_norm};
  for (int i = 0; i < config.epochs_a; ++i) {
    const int e = first_epoch + i;
    EpochRecord rec;
    rec.epoch = e;
    rec.stage = Stage::kAdversarial;
    try {
      CounterRng rng = stream.Fork(static_cast<std::uint64_t>(i));
      AdversarialEpochResult res =
          AdversarialEpoch(models.policy, models.generator, models.discriminator,
                           models.discriminator_adam, teacher, spec,
                           EpochSeeds(config, e, false), settings, rng);
      rec.policy_loss = -res.policy_objective;
      rec.discriminator_loss = res.discriminator_loss;
      rec.gen_loss_train = GeneratorLoss(models.generator, TransitionsOf(res.agent_rollouts),
                                         config.reconstruction_loss);
      const auto holdout = CollectAgentTransitions(spec, models.policy,
                                                   EpochSeeds(config, e, true), 0.0, nullptr);
      rec.gen_loss_eval = GeneratorLoss(models.generator, holdout, config.reconstruction_loss);
      CheckFinite(rec.gen_loss_eval, "generator hold-out loss");
      rec.aer_probe = MaybeProbe(config, spec, models.policy, i, config.epochs_a);
    } catch (const NumericError& err) {
      throw AtEpoch(err, e);
    }
    log.records.push_back(rec);
    if (on_epoch) on_epoch(rec);
  }
  return log;
}

data::Dataset TeacherDatasetFor(const ExperimentConfig& config) {
  if (!config.dataset_path.empty()) return data::LoadDataset(config.dataset_path);
  return data::GenerateTeacherDataset(SpecFor(config), config.n_teacher_trajectories,
                                      config.teacher_seed_base);
}

TrainResult Train(const ExperimentConfig& config, const TrainOptions& options) {
  ValidateOrThrow(config);
  const env::EnvSpec spec = SpecFor(config);
  data::Dataset owned;
  const data::Dataset* teacher = options.dataset;
  if (teacher == nullptr) {
    owned = TeacherDatasetFor(config);
    teacher = &owned;
  }
  if (teacher->env_name != spec.name) {
    throw ConfigError({"dataset env '" + teacher->env_name + "' does not match '" +
                       spec.name + "'"});
  }

  TrainResult result{Models::Create(config, spec), {}, {}, std::nullopt};
  result.log = RunReconstructionStage(config, spec, result.models, *teacher, options.on_epoch);
  result.stage1 = result.models.ToCheckpoint();
  if (options.run_dir) result.stage1.Write(*options.run_dir / "stage1.ckpt");
  if (options.stage1_only) return result;

  TrainingLog adv = RunAdversarialStage(config, spec, result.models, *teacher,
                                        config.epochs_r, options.on_epoch);
  result.log.records.insert(result.log.records.end(), adv.records.begin(), adv.records.end());
  result.stage2 = result.models.ToCheckpoint();
  if (options.run_dir) result.stage2->Write(*options.run_dir / "stage2.ckpt");
  return result;
}

}  // namespace ilfo::training
