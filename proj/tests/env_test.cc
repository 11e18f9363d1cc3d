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

#include <cmath>
#include <numbers>
#include <string>
#include <vector>

#include "gtest/gtest.h"
#include "ilfo/env/env.h"
#include "ilfo/errors.h"
#include "ilfo/random.h"

namespace ilfo::env {
namespace {

EnvState State(std::vector<double> v) { return EnvState{std::move(v), 0}; }

double ReturnFrom(const EnvSpec& spec, const Policy& policy, EnvState s) {
  double total = 0.0;
  for (;;) {
    StepResult r = Step(spec, s, policy(s.vector));
    total += r.reward;
    if (r.done) return total;
    s = r.state;
  }
}

TEST(MakeSpecTest, NamesAndDimensions) {
  const EnvSpec di = MakeSpec("double-integrator");
  EXPECT_EQ(di.state_dim, 4u);
  EXPECT_EQ(di.action_dim, 2u);
  EXPECT_EQ(di.horizon, 100);
  EXPECT_EQ(di.dt, 0.05);
  EXPECT_EQ(MakeSpec("DoubleIntegrator2D").kind, EnvKind::kDoubleIntegrator2D);
  const EnvSpec p = MakeSpec("pendulum");
  EXPECT_EQ(p.state_dim, 3u);
  EXPECT_EQ(p.action_dim, 1u);
  EXPECT_EQ(MakeSpec("Pendulum1D").kind, EnvKind::kPendulum1D);
  EXPECT_THROW(MakeSpec("cartpole"), UnknownEnvError);
  EXPECT_THROW(MakeSpec("pendulum", 0), ContractError);
  EXPECT_THROW(MakeSpec("pendulum", 10, 0.0), ContractError);
}

TEST(ResetTest, DoubleIntegratorMatchesNamedStream) {
  const EnvSpec spec = MakeSpec("double-integrator");
  for (std::uint64_t seed : {0ull, 1ull, 42ull, 123456789ull}) {
    CounterRng rng(seed, "env.reset." + spec.name);
    const double x = -1.0 + 2.0 * (static_cast<double>(rng.NextU64() >> 11) * 0x1.0p-53);
    const double y = -1.0 + 2.0 * (static_cast<double>(rng.NextU64() >> 11) * 0x1.0p-53);
    const EnvState s = Reset(spec, seed);
    EXPECT_EQ(s.vector, (std::vector<double>{x, y, 0.0, 0.0}));
    EXPECT_EQ(s.step_index, 0);
  }
}

TEST(ResetTest, DeterministicAndSeedSensitive) {
  for (const char* name : {"double-integrator", "pendulum"}) {
    const EnvSpec spec = MakeSpec(name);
    EXPECT_EQ(Reset(spec, 5), Reset(spec, 5));
    for (std::uint64_t s = 0; s < 200; ++s) EXPECT_NE(Reset(spec, s), Reset(spec, s + 1));
  }
}

TEST(ResetTest, PendulumRanges) {
  const EnvSpec spec = MakeSpec("pendulum");
  for (std::uint64_t seed = 0; seed < 500; ++seed) {
    const auto& v = Reset(spec, seed).vector;
    ASSERT_EQ(v.size(), 3u);
    EXPECT_NEAR(v[0] * v[0] + v[1] * v[1], 1.0, 1e-12);
    EXPECT_LE(std::fabs(v[2]), 1.0);
  }
}

TEST(StepTest, ZeroVelocityZeroActionIsFixedPoint) {
  const EnvSpec spec = MakeSpec("double-integrator");
  const double zero[2] = {0.0, 0.0};
  const StepResult r = Step(spec, State({1, 0, 0, 0}), zero);
  EXPECT_EQ(r.state.vector, (std::vector<double>{1, 0, 0, 0}));
  EXPECT_EQ(r.reward, -1.0);
  EXPECT_FALSE(r.done);
  EXPECT_EQ(r.state.step_index, 1);
}

TEST(StepTest, PositionIntegratesVelocity) {
  const EnvSpec spec = MakeSpec("double-integrator");
  const double zero[2] = {0.0, 0.0};
  const StepResult r = Step(spec, State({0, 0, 1, 0}), zero);
  EXPECT_EQ(r.state.vector, (std::vector<double>{0.05, 0, 1, 0}));
}

TEST(StepTest, ActionsClampedAndDimensionsChecked) {
  const EnvSpec spec = MakeSpec("double-integrator");
  const double big[2] = {5.0, -5.0};
  const StepResult r = Step(spec, State({0, 0, 0, 0}), big);
  EXPECT_EQ(r.state.vector[2], 0.05);
  EXPECT_EQ(r.state.vector[3], -0.05);
  const double one[1] = {0.0};
  EXPECT_THROW(Step(spec, State({0, 0, 0, 0}), one), DimensionError);
  const double two[2] = {0.0, 0.0};
  EXPECT_THROW(Step(spec, State({0, 0, 0}), two), DimensionError);
}

TEST(StepTest, DoneAtHorizonOrEscape) {
  const EnvSpec spec = MakeSpec("double-integrator", 3);
  const double zero[2] = {0.0, 0.0};
  EnvState s = State({0.5, 0, 0, 0});
  s.step_index = 2;
  EXPECT_TRUE(Step(spec, s, zero).done);
  EXPECT_TRUE(Step(MakeSpec("double-integrator"), State({9.99, 0, 1, 0}), zero).done);
}

TEST(StepTest, PendulumUprightStaysUpright) {
  const EnvSpec spec = MakeSpec("pendulum");
  const double zero[1] = {0.0};
  const StepResult r = Step(spec, State({1.0, 0.0, 0.0}), zero);
  EXPECT_LT(std::fabs(std::atan2(r.state.vector[1], r.state.vector[0])), 1e-6);
  EXPECT_EQ(r.reward, 0.0);
}

TEST(StepTest, PendulumSemiImplicitEuler) {
  const EnvSpec spec = MakeSpec("pendulum");
  const double theta = 0.3, omega = -0.5, u = 0.4;
  const double act[1] = {u};
  const StepResult r = Step(spec, State({std::cos(theta), std::sin(theta), omega}), act);
  const double w = omega + (9.81 * std::sin(theta) + 5.0 * u) * 0.05;
  const double th = theta + w * 0.05;
  EXPECT_NEAR(r.state.vector[2], w, 1e-12);
  EXPECT_NEAR(std::atan2(r.state.vector[1], r.state.vector[0]), th, 1e-12);
  EXPECT_NEAR(r.reward, -(theta * theta + 0.1 * omega * omega + 0.001 * u * u), 1e-12);
}

TEST(TeacherTest, DoubleIntegratorPdLaw) {
  const EnvSpec spec = MakeSpec("double-integrator");
  const std::vector<double> origin{0, 0, 0, 0};
  EXPECT_EQ(TeacherAction(spec, origin), (std::vector<double>{0, 0}));
  const std::vector<double> x1{1, 0, 0, 0};
  EXPECT_EQ(TeacherAction(spec, x1), (std::vector<double>{-1, 0}));
  const std::vector<double> s{0.2, -0.1, 0.1, 0.05};
  const auto a = TeacherAction(spec, s);
  EXPECT_NEAR(a[0], -1.0 * 0.2 - 1.8 * 0.1, 1e-15);
  EXPECT_NEAR(a[1], -1.0 * -0.1 - 1.8 * 0.05, 1e-15);
}

TEST(TeacherTest, ActionsWithinBounds) {
  CounterRng rng(1, "teacher");
  for (const char* name : {"double-integrator", "pendulum"}) {
    const EnvSpec spec = MakeSpec(name);
    for (int i = 0; i < 1000; ++i) {
      std::vector<double> s(spec.state_dim);
      for (double& x : s) x = rng.Uniform(-20.0, 20.0);
      for (double a : TeacherAction(spec, s)) {
        EXPECT_GE(a, -1.0);
        EXPECT_LE(a, 1.0);
      }
    }
  }
}

TEST(RolloutTest, ZeroPolicyFromRestKeepsPosition) {
  const EnvSpec spec = MakeSpec("double-integrator", 3);
  const data::Trajectory t = Rollout(spec, ZeroPolicy(spec), 17, false);
  ASSERT_EQ(t.states.size(), 4u);
  for (const auto& s : t.states) {
    EXPECT_EQ(s[0], t.states[0][0]);
    EXPECT_EQ(s[1], t.states[0][1]);
  }
  EXPECT_FALSE(t.actions.has_value());
  EXPECT_FALSE(t.rewards.has_value());
  EXPECT_EQ(t.seed, 17u);
}

TEST(RolloutTest, RecordsActionsAndRewards) {
  const EnvSpec spec = MakeSpec("double-integrator", 10);
  const data::Trajectory t = Rollout(spec, TeacherPolicy(spec), 3, true);
  ASSERT_TRUE(t.actions && t.rewards);
  EXPECT_EQ(t.actions->size(), t.states.size() - 1);
  EXPECT_EQ(t.rewards->size(), t.states.size() - 1);
  double total = 0.0;
  for (double r : *t.rewards) total += r;
  EXPECT_EQ(total, EpisodeReturn(spec, TeacherPolicy(spec), 3));
}

TEST(RolloutTest, TeacherBeatsZeroPolicyFromOffset) {
  const EnvSpec spec = MakeSpec("double-integrator");
  EXPECT_GT(ReturnFrom(spec, TeacherPolicy(spec), State({1, 0, 0, 0})),
            ReturnFrom(spec, ZeroPolicy(spec), State({1, 0, 0, 0})));
}

TEST(RolloutTest, WrongActionDimension) {
  const EnvSpec spec = MakeSpec("double-integrator");
  const Policy bad = [](std::span<const double>) { return std::vector<double>{0.0}; };
  EXPECT_THROW(Rollout(spec, bad, 0, false), DimensionError);
}

TEST(RolloutTest, DeterministicPerSeed) {
  for (const char* name : {"double-integrator", "pendulum"}) {
    const EnvSpec spec = MakeSpec(name);
    const auto a = Rollout(spec, TeacherPolicy(spec), 9, true);
    const auto b = Rollout(spec, TeacherPolicy(spec), 9, true);
    EXPECT_EQ(a.states, b.states);
    EXPECT_EQ(*a.actions, *b.actions);
    EXPECT_EQ(Rollout(spec, RandomPolicy(spec, 4), 9, false).states,
              Rollout(spec, RandomPolicy(spec, 4), 9, false).states);
  }
}

TEST(Properties, TeacherDominatesRandom) {
  for (const char* name : {"double-integrator", "pendulum"}) {
    const EnvSpec spec = MakeSpec(name);
    double teacher = 0.0, random = 0.0;
    for (std::uint64_t seed = 0; seed < 100; ++seed) {
      teacher += EpisodeReturn(spec, TeacherPolicy(spec), seed);
      random += EpisodeReturn(spec, RandomPolicy(spec, seed), seed);
    }
    EXPECT_GT(teacher, random) << name;
  }
}

TEST(Properties, StatesStayFiniteUnderBoundedActions) {
  CounterRng rng(6, "bang");
  for (const char* name : {"double-integrator", "pendulum"}) {
    const EnvSpec spec = MakeSpec(name, 500);
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
      // bang-bang actions drive states as far as the bounds allow
      const Policy bang = [&](std::span<const double>) {
        std::vector<double> a(spec.action_dim);
        for (double& x : a) x = rng.Uniform() < 0.5 ? -1.0 : 1.0;
        return a;
      };
      for (const auto& s : Rollout(spec, bang, seed, false).states) {
        for (double x : s) ASSERT_TRUE(std::isfinite(x));
      }
    }
  }
}

TEST(WrapAngleTest, Range) {
  EXPECT_NEAR(WrapAngle(3 * std::numbers::pi / 2), -std::numbers::pi / 2, 1e-12);
  EXPECT_EQ(WrapAngle(std::numbers::pi), std::numbers::pi);
  EXPECT_NEAR(WrapAngle(-std::numbers::pi), std::numbers::pi, 1e-12);
  EXPECT_NEAR(WrapAngle(0.25), 0.25, 1e-15);
}

}  // namespace
}  // namespace ilfo::env
