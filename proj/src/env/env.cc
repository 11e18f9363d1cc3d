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

#include "ilfo/env/env.h"

#include <algorithm>
#include <cmath>
#include <memory>
#include <numbers>

#include "ilfo/errors.h"
#include "ilfo/random.h"

namespace ilfo::env {
namespace {

constexpr double kBound = 10.0;
constexpr double kKp = 1.0;
constexpr double kKd = 1.8;

double Clip1(double v) { return std::clamp(v, -1.0, 1.0); }

void CheckState(const EnvSpec& spec, std::span<const double> s) {
  if (s.size() != spec.state_dim) {
    throw DimensionError(spec.name + ": state has dimension " +
                         std::to_string(s.size()) + ", expected " +
                         std::to_string(spec.state_dim));
  }
}

void CheckAction(const EnvSpec& spec, std::span<const double> a) {
  if (a.size() != spec.action_dim) {
    throw DimensionError(spec.name + ": action has dimension " +
                         std::to_string(a.size()) + ", expected " +
                         std::to_string(spec.action_dim));
  }
}

StepResult StepDoubleIntegrator(const EnvSpec& spec, const EnvState& s,
                                std::span<const double> a) {
  const double ax = Clip1(a[0]), ay = Clip1(a[1]);
  const auto& v = s.vector;
  StepResult r;
  r.reward = -(v[0] * v[0] + v[1] * v[1]) - 0.01 * (ax * ax + ay * ay);
  r.state.vector = {v[0] + v[2] * spec.dt, v[1] + v[3] * spec.dt,
                    v[2] + ax * spec.dt, v[3] + ay * spec.dt};
  r.state.step_index = s.step_index + 1;
  const double dist = std::hypot(r.state.vector[0], r.state.vector[1]);
  r.done = r.state.step_index >= spec.horizon || dist > kBound;
  return r;
}

StepResult StepPendulum(const EnvSpec& spec, const EnvState& s,
                        std::span<const double> a) {
  const double u = Clip1(a[0]);
  const double theta = std::atan2(s.vector[1], s.vector[0]);
  const double omega = s.vector[2];
  const double wrapped = WrapAngle(theta);
  StepResult r;
  r.reward = -(wrapped * wrapped + 0.1 * omega * omega + 0.001 * u * u);
  // Semi-implicit Euler; theta = 0 is upright.
  const double accel = kPendulumGravity * std::sin(theta) + kPendulumTorqueGain * u;
  const double next_omega =
      std::clamp(omega + accel * spec.dt, -kPendulumMaxSpeed, kPendulumMaxSpeed);
  const double next_theta = theta + next_omega * spec.dt;
  r.state.vector = {std::cos(next_theta), std::sin(next_theta), next_omega};
  r.state.step_index = s.step_index + 1;
  r.done = r.state.step_index >= spec.horizon;
  return r;
}

std::vector<double> PendulumTeacher(std::span<const double> s) {
  const double theta = std::atan2(s[1], s[0]);
  const double omega = s[2];
  // Energy relative to resting upright: E = w^2/2 + g (cos(theta) - 1).
  const double energy =
      0.5 * omega * omega + kPendulumGravity * (std::cos(theta) - 1.0);
  if (std::fabs(theta) < 0.6 && std::fabs(energy) < 2.0) {
    return {Clip1(-(3.0 * theta + 1.0 * omega))};
  }
  // dE/dt = omega * gain * u: push along omega while below the target.
  const double direction = omega == 0.0 ? 1.0 : (omega > 0.0 ? 1.0 : -1.0);
  return {Clip1(-0.5 * energy * direction)};
}

}  // namespace

double WrapAngle(double theta) {
  double t = std::remainder(theta, 2.0 * std::numbers::pi);
  if (t <= -std::numbers::pi) t += 2.0 * std::numbers::pi;
  return t;
}

EnvSpec MakeSpec(std::string_view name, int horizon, double dt) {
  if (horizon < 1) throw ContractError("horizon must be >= 1");
  if (!(dt > 0.0)) throw ContractError("dt must be > 0");
  EnvSpec spec;
  spec.horizon = horizon;
  spec.dt = dt;
  if (name == "double-integrator" || name == "DoubleIntegrator2D") {
    spec.name = "double-integrator";
    spec.kind = EnvKind::kDoubleIntegrator2D;
    spec.state_dim = 4;
    spec.action_dim = 2;
  } else if (name == "pendulum" || name == "Pendulum1D") {
    spec.name = "pendulum";
    spec.kind = EnvKind::kPendulum1D;
    spec.state_dim = 3;
    spec.action_dim = 1;
  } else {
    throw UnknownEnvError("unknown environment '" + std::string(name) + "'");
  }
  return spec;
}

std::vector<std::string> EnvNames() { return {"double-integrator", "pendulum"}; }

EnvState Reset(const EnvSpec& spec, std::uint64_t seed) {
  CounterRng rng(seed, "env.reset." + spec.name);
  EnvState s;
  switch (spec.kind) {
    case EnvKind::kDoubleIntegrator2D: {
      const double x = rng.Uniform(-1.0, 1.0);
      const double y = rng.Uniform(-1.0, 1.0);
      s.vector = {x, y, 0.0, 0.0};
      break;
    }
    case EnvKind::kPendulum1D: {
      const double theta = WrapAngle(rng.Uniform(-std::numbers::pi, std::numbers::pi));
      const double omega = rng.Uniform(-1.0, 1.0);
      s.vector = {std::cos(theta), std::sin(theta), omega};
      break;
    }
  }
  return s;
}

StepResult Step(const EnvSpec& spec, const EnvState& state,
                std::span<const double> action) {
  CheckState(spec, state.vector);
  CheckAction(spec, action);
  switch (spec.kind) {
    case EnvKind::kDoubleIntegrator2D:
      return StepDoubleIntegrator(spec, state, action);
    case EnvKind::kPendulum1D:
      return StepPendulum(spec, state, action);
  }
  throw UnknownEnvError(spec.name);
}

std::vector<double> TeacherAction(const EnvSpec& spec,
                                  std::span<const double> state) {
  CheckState(spec, state);
  switch (spec.kind) {
    case EnvKind::kDoubleIntegrator2D:
      return {Clip1(-kKp * state[0] - kKd * state[2]),
              Clip1(-kKp * state[1] - kKd * state[3])};
    case EnvKind::kPendulum1D:
      return PendulumTeacher(state);
  }
  throw UnknownEnvError(spec.name);
}

Policy TeacherPolicy(const EnvSpec& spec) {
  return [spec](std::span<const double> s) { return TeacherAction(spec, s); };
}

Policy ZeroPolicy(const EnvSpec& spec) {
  return [m = spec.action_dim](std::span<const double>) {
    return std::vector<double>(m, 0.0);
  };
}

Policy RandomPolicy(const EnvSpec& spec, std::uint64_t seed) {
  auto rng = std::make_shared<CounterRng>(seed, "policy.random");
  return [m = spec.action_dim, rng](std::span<const double>) {
    std::vector<double> a(m);
    for (double& x : a) x = rng->Uniform(-1.0, 1.0);
    return a;
  };
}

data::Trajectory Rollout(const EnvSpec& spec, const Policy& policy,
                         std::uint64_t seed, bool record_actions) {
  data::Trajectory traj;
  traj.seed = seed;
  if (record_actions) {
    traj.actions.emplace();
    traj.rewards.emplace();
  }
  EnvState s = Reset(spec, seed);
  traj.states.push_back(s.vector);
  for (;;) {
    std::vector<double> a = policy(s.vector);
    CheckAction(spec, a);
    for (double& x : a) x = Clip1(x);
    StepResult r = Step(spec, s, a);
    traj.states.push_back(r.state.vector);
    if (record_actions) {
      traj.actions->push_back(std::move(a));
      traj.rewards->push_back(r.reward);
    }
    s = std::move(r.state);
    if (r.done) break;
  }
  return traj;
}

double EpisodeReturn(const EnvSpec& spec, const Policy& policy,
                     std::uint64_t seed) {
  EnvState s = Reset(spec, seed);
  double total = 0.0;
  for (;;) {
    std::vector<double> a = policy(s.vector);
    CheckAction(spec, a);
    StepResult r = Step(spec, s, a);
    total += r.reward;
    s = std::move(r.state);
    if (r.done) break;
  }
  return total;
}

}  // namespace ilfo::env
