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

#ifndef ILFO_ENV_ENV_H_
#define ILFO_ENV_ENV_H_

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "ilfo/data/trajectory.h"

namespace ilfo::env {

enum class EnvKind { kDoubleIntegrator2D, kPendulum1D };

struct EnvSpec {
  std::string name;
  EnvKind kind = EnvKind::kDoubleIntegrator2D;
  std::size_t state_dim = 0;
  std::size_t action_dim = 0;
  int horizon = 100;
  double dt = 0.05;
};

// Accepts "double-integrator" / "DoubleIntegrator2D" and "pendulum" /
// "Pendulum1D". Throws UnknownEnvError otherwise.
EnvSpec MakeSpec(std::string_view name, int horizon = 100, double dt = 0.05);
std::vector<std::string> EnvNames();

struct EnvState {
  std::vector<double> vector;
  int step_index = 0;
  bool operator==(const EnvState&) const = default;
};

struct StepResult {
  EnvState state;
  double reward = 0.0;
  bool done = false;
};

// Deterministic initial state for (spec, seed).
//   DoubleIntegrator2D: position ~ U[-1,1]^2, zero velocity.
//   Pendulum1D: theta ~ U(-pi, pi], theta_dot ~ U[-1, 1].
EnvState Reset(const EnvSpec& spec, std::uint64_t seed);

// One transition. Actions are clamped to [-1, 1].
StepResult Step(const EnvSpec& spec, const EnvState& state,
                std::span<const double> action);

// Scripted teacher, clipped to [-1, 1].
//   DoubleIntegrator2D: a = clip(-1.0 * pos - 1.8 * vel) per axis.
//   Pendulum1D: energy pumping, PD stabilization near upright.
std::vector<double> TeacherAction(const EnvSpec& spec,
                                  std::span<const double> state);

using Policy = std::function<std::vector<double>(std::span<const double>)>;

Policy TeacherPolicy(const EnvSpec& spec);
Policy ZeroPolicy(const EnvSpec& spec);
// Uniform on [-1, 1]^m. Each call of the returned policy advances its own
// stream, so a fresh policy must be created per episode for replayability.
Policy RandomPolicy(const EnvSpec& spec, std::uint64_t seed);

// Runs one episode from Reset(spec, seed) until done. Actions and rewards
// are stored iff `record_actions`.
data::Trajectory Rollout(const EnvSpec& spec, const Policy& policy,
                         std::uint64_t seed, bool record_actions);

// Undiscounted return of one episode.
double EpisodeReturn(const EnvSpec& spec, const Policy& policy,
                     std::uint64_t seed);

// Angle in (-pi, pi].
double WrapAngle(double theta);

// Physical constants of Pendulum1D.
inline constexpr double kPendulumGravity = 9.81;     // g / l, 1/s^2
inline constexpr double kPendulumTorqueGain = 5.0;   // rad/s^2 per unit action
inline constexpr double kPendulumMaxSpeed = 8.0;     // rad/s

}  // namespace ilfo::env

#endif  // ILFO_ENV_ENV_H_
