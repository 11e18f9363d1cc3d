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
#include <vector>

#include "gtest/gtest.h"
#include "ilfo/autodiff/graph.h"
#include "ilfo/data/dataset.h"
#include "ilfo/env/env.h"
#include "ilfo/errors.h"
#include "ilfo/eval/metrics.h"
#include "ilfo/eval/oracles.h"
#include "ilfo/eval/report.h"
#include "ilfo/models/models.h"
#include "ilfo/random.h"

namespace ilfo::eval {
namespace {

std::vector<std::uint64_t> Range(std::uint64_t lo, std::uint64_t n) {
  std::vector<std::uint64_t> v(n);
  for (std::uint64_t i = 0; i < n; ++i) v[i] = lo + i;
  return v;
}

TEST(AerTest, ConstantRewardEpisodes) {
  const std::vector<double> returns(7, -100.0);
  const AerStats s = SummarizeReturns(returns);
  EXPECT_EQ(s.mean, -100.0);
  EXPECT_EQ(s.std, 0.0);
}

TEST(AerTest, PopulationStd) {
  const std::vector<double> returns{1.0, 3.0};
  EXPECT_EQ(SummarizeReturns(returns).std, 1.0);
}

TEST(AerTest, MatchesEpisodeSums) {
  const env::EnvSpec spec = env::MakeSpec("double-integrator");
  const auto seeds = Range(10, 5);
  const env::Policy teacher = env::TeacherPolicy(spec);
  const AerStats s = Aer(teacher, spec, seeds);
  std::vector<double> returns;
  for (auto seed : seeds) {
    const data::Trajectory t = env::Rollout(spec, teacher, seed, true);
    double sum = 0.0;
    for (double r : *t.rewards) sum += r;
    returns.push_back(sum);
  }
  double mean = 0.0;
  for (double r : returns) mean += r;
  mean /= 5.0;
  double var = 0.0;
  for (double r : returns) var += (r - mean) * (r - mean);
  EXPECT_NEAR(s.mean, mean, 1e-12);
  EXPECT_NEAR(s.std, std::sqrt(var / 5.0), 1e-12);
}

TEST(AerTest, SingleSeedHasZeroStdAndEmptyRejected) {
  const env::EnvSpec spec = env::MakeSpec("pendulum");
  const std::vector<std::uint64_t> one{3};
  EXPECT_EQ(Aer(env::TeacherPolicy(spec), spec, one).std, 0.0);
  EXPECT_THROW(Aer(env::TeacherPolicy(spec), spec, std::vector<std::uint64_t>{}),
               EmptyInputError);
}

TEST(AerTest, TeacherBeatsRandom) {
  const env::EnvSpec spec = env::MakeSpec("double-integrator");
  const auto seeds = Range(0, 100);
  EXPECT_GT(Aer(env::TeacherPolicy(spec), spec, seeds).mean,
            Aer(RandomPolicyFactory(spec), spec, seeds).mean);
}

TEST(PerformanceTest, ReferenceValue) {
  // agent, random, teacher
  EXPECT_NEAR(Performance(3573.4266, 18.8985, 3530.2857), 1.0127, 0.01);
}

TEST(PerformanceTest, Endpoints) {
  EXPECT_EQ(Performance(-95.5, -95.5, -16.1), 0.0);
  EXPECT_EQ(Performance(-16.1, -95.5, -16.1), 1.0);
  EXPECT_THROW(Performance(1.0, 2.0, 2.0), DegenerateError);
}

TEST(PerformanceTest, ShiftInvariant) {
  CounterRng rng(1, "shift");
  for (int i = 0; i < 200; ++i) {
    const double a = rng.Uniform(-100, 100), r = rng.Uniform(-100, 100);
    const double t = r + rng.Uniform(1, 100);
    const double c = rng.Uniform(-1000, 1000);
    EXPECT_NEAR(Performance(a + c, r + c, t + c), Performance(a, r, t), 1e-9);
  }
}

TEST(CvTest, ReferenceValue) {
  EXPECT_NEAR(CoefficientOfVariation(9512.2995, 538.5918), 0.0566, 1e-4);
}

TEST(CvTest, EdgeCases) {
  EXPECT_EQ(CoefficientOfVariation(-4.0, 0.0), 0.0);
  EXPECT_EQ(CoefficientOfVariation(-4.0, 2.0), 0.5);
  EXPECT_THROW(CoefficientOfVariation(0.0, 1.0), DegenerateError);
}

TEST(DisjointSeeds, EmptyDatasetGivesFirstCandidates) {
  const env::EnvSpec spec = env::MakeSpec("double-integrator");
  EXPECT_EQ(DisjointEvalSeeds(spec, {}, StateSet(), 5, 40), Range(40, 5));
  EXPECT_THROW(DisjointEvalSeeds(spec, {}, StateSet(), 0), ContractError);
}

TEST(DisjointSeeds, DatasetSeedExcluded) {
  const env::EnvSpec spec = env::MakeSpec("double-integrator");
  data::Dataset ds{spec.name, "scripted", {}};
  ds.trajectories.push_back(env::Rollout(spec, env::TeacherPolicy(spec), 2, false));
  const auto seeds = DisjointEvalSeeds(spec, ds, StateSet(), 4, 0);
  EXPECT_EQ(seeds, (std::vector<std::uint64_t>{0, 1, 3, 4}));
}

TEST(DisjointSeeds, OnlineStatesExcluded) {
  const env::EnvSpec spec = env::MakeSpec("double-integrator");
  StateSet online;
  online.Add(env::Reset(spec, 0).vector);
  // perturbations within the tolerance still collide
  auto near = env::Reset(spec, 1).vector;
  near[0] += 5e-10;
  online.Add(near);
  EXPECT_EQ(DisjointEvalSeeds(spec, {}, online, 2, 0), (std::vector<std::uint64_t>{2, 3}));
}

TEST(DisjointSeeds, BudgetExhausted) {
  const env::EnvSpec spec = env::MakeSpec("double-integrator");
  const data::Dataset ds = data::GenerateTeacherDataset(spec, 10, 0);
  EXPECT_THROW(DisjointEvalSeeds(spec, ds, StateSet(), 3, 0, 12), InsufficientSeedsError);
}

TEST(DisjointSeeds, NeverCollideOverRandomDatasets) {
  CounterRng rng(2, "datasets");
  for (const char* name : {"double-integrator", "pendulum"}) {
    const env::EnvSpec spec = env::MakeSpec(name, 5);
    for (int draw = 0; draw < 20; ++draw) {
      const std::uint64_t base = rng.Below(50);
      const std::size_t n = 1 + rng.Below(30);
      const data::Dataset ds = data::GenerateTeacherDataset(spec, n, base);
      StateSet online;
      for (int k = 0; k < 10; ++k) online.Add(env::Reset(spec, rng.Below(100)).vector);
      const auto seeds = DisjointEvalSeeds(spec, ds, online, 40, 0);
      ASSERT_EQ(seeds.size(), 40u);
      for (auto seed : seeds) {
        EXPECT_TRUE(seed < base || seed >= base + n);
        const auto s = env::Reset(spec, seed).vector;
        // exhaustive comparison against every excluded state
        for (const auto& t : ds.trajectories) {
          double worst = 0.0;
          for (std::size_t k = 0; k < s.size(); ++k) {
            worst = std::max(worst, std::fabs(s[k] - t.states[0][k]));
          }
          EXPECT_GT(worst, 1e-9);
        }
        EXPECT_FALSE(online.Contains(s));
      }
    }
  }
}

TEST(Oracle, OptimalDiscriminatorExamples) {
  EXPECT_DOUBLE_EQ(OptimalDiscriminatorOracle(0.2, 0.6), 0.25);
  EXPECT_EQ(OptimalDiscriminatorOracle(0.3, 0.3), 0.5);
  EXPECT_EQ(OptimalDiscriminatorOracle(0.3, 0.0), 1.0);
  EXPECT_THROW(OptimalDiscriminatorOracle(0.0, 0.0), DegenerateError);
  EXPECT_THROW(OptimalDiscriminatorOracle(-0.1, 0.5), ContractError);
}

TEST(Oracle, OptimalDiscriminatorRangeAndSwap) {
  CounterRng rng(3, "oracle");
  for (int i = 0; i < 1000; ++i) {
    const double pt = rng.Uniform(), pa = rng.Uniform();
    const double d = OptimalDiscriminatorOracle(pt, pa);
    EXPECT_GE(d, 0.0);
    EXPECT_LE(d, 1.0);
    EXPECT_NEAR(d, 1.0 - OptimalDiscriminatorOracle(pa, pt), 1e-15);
  }
}

TEST(FiniteDifference, Square) {
  ad::ParameterSet p;
  p.Add("x", ad::Tensor::Scalar(3.0));
  const auto g = FiniteDifferenceGradient(
      [&] { return p.Get("x").item() * p.Get("x").item(); }, p, 1e-5);
  EXPECT_NEAR(g.at("x").item(), 6.0, 1e-6);
  EXPECT_EQ(p.Get("x").item(), 3.0);
}

TEST(FiniteDifference, ConstantIsZeroAndBadStep) {
  ad::ParameterSet p;
  p.Add("x", ad::Tensor({2, 2}, 1.0));
  const auto g = FiniteDifferenceGradient([] { return 4.0; }, p, 1e-5);
  for (std::size_t i = 0; i < 4; ++i) EXPECT_EQ(g.at("x")[i], 0.0);
  EXPECT_THROW(FiniteDifferenceGradient([] { return 4.0; }, p, 0.0), ContractError);
}

TEST(FiniteDifference, AgreesWithAutodiffOnTwoLayerNet) {
  models::PolicyNet net(3, 2, {6}, 4);
  CounterRng rng(4, "x");
  ad::Tensor x({5, 3}), y({5, 2});
  for (std::size_t i = 0; i < x.size(); ++i) x[i] = rng.Uniform(-1, 1);
  for (std::size_t i = 0; i < y.size(); ++i) y[i] = rng.Uniform(-1, 1);
  auto loss = [&](ad::Graph& g) {
    return ad::Mean(ad::Square(net.Forward(g, g.Constant(x)) - g.Constant(y)));
  };
  ad::Graph g;
  ad::Var l = loss(g);
  g.Backward(l);
  const auto analytic = g.ParameterGradients();
  const auto fd = FiniteDifferenceGradient(
      [&] {
        ad::Graph h;
        return loss(h).value().item();
      },
      net.params(), 1e-5);
  for (const auto& [name, a] : analytic) {
    for (std::size_t i = 0; i < a.size(); ++i) {
      const double scale = std::max({std::fabs(a[i]), std::fabs(fd.at(name)[i]), 1e-3});
      EXPECT_LT(std::fabs(a[i] - fd.at(name)[i]) / scale, 1e-4) << name << "[" << i << "]";
    }
  }
}

TEST(AnalyticDynamics, GraphMatchesVectorForm) {
  const env::EnvSpec spec = env::MakeSpec("double-integrator");
  CounterRng rng(5, "dyn");
  const auto dyn = AnalyticDoubleIntegrator(spec);
  for (int i = 0; i < 50; ++i) {
    std::vector<double> s(4), a(2);
    for (double& v : s) v = rng.Uniform(-3, 3);
    for (double& v : a) v = rng.Uniform(-1, 1);
    ad::Graph g;
    const ad::Tensor out =
        dyn(g, g.Constant(ad::Tensor::Row(s)), g.Constant(ad::Tensor::Row(a))).value();
    const auto ref = DoubleIntegratorNext(spec, s, a);
    const env::StepResult step = env::Step(spec, {s, 0}, a);
    for (std::size_t k = 0; k < 4; ++k) {
      EXPECT_NEAR(out[k], ref[k], 1e-15);
      EXPECT_EQ(ref[k], step.state.vector[k]);
    }
  }
  EXPECT_THROW(AnalyticDoubleIntegrator(env::MakeSpec("pendulum")), ContractError);
}

TEST(BcOracle, ZeroEpochsReturnsUntrainedNet) {
  const env::EnvSpec spec = env::MakeSpec("double-integrator", 10);
  const data::Dataset ds = data::GenerateLabelledTeacherDataset(spec, 3, 0);
  BcSettings s;
  s.hidden = {8};
  s.epochs = 0;
  const BcResult r = BcOracleTrain(spec, ds, s);
  EXPECT_TRUE(r.policy.params().SameValues(models::PolicyNet(4, 2, {8}, 0).params()));
  EXPECT_TRUE(r.epoch_loss.empty());
}

TEST(BcOracle, MissingLabels) {
  const env::EnvSpec spec = env::MakeSpec("double-integrator", 10);
  EXPECT_THROW(BcOracleTrain(spec, data::GenerateTeacherDataset(spec, 3, 0), {}),
               MissingLabelsError);
}

TEST(BcOracle, LossFallsOverFirstEpochs) {
  const env::EnvSpec spec = env::MakeSpec("double-integrator");
  const data::Dataset ds = data::GenerateLabelledTeacherDataset(spec, 30, 0);
  BcSettings s;
  s.hidden = {32, 32};
  s.epochs = 10;
  const BcResult r = BcOracleTrain(spec, ds, s);
  ASSERT_EQ(r.epoch_loss.size(), 10u);
  // non-increasing in expectation: compare the halves
  const double early = r.epoch_loss[0] + r.epoch_loss[1] + r.epoch_loss[2];
  const double late = r.epoch_loss[7] + r.epoch_loss[8] + r.epoch_loss[9];
  EXPECT_LT(late, early);
  EXPECT_LT(r.epoch_loss.back(), r.epoch_loss.front());
}

TEST(BcOracle, ReachesTeacherLevelPerformance) {
  const env::EnvSpec spec = env::MakeSpec("double-integrator");
  const data::Dataset ds = data::GenerateLabelledTeacherDataset(spec, 700, 0);
  BcSettings s;
  s.epochs = 5;
  const BcResult r = BcOracleTrain(spec, ds, s);
  const auto seeds = DisjointEvalSeeds(spec, ds, StateSet(), 200, 0);
  const models::PolicyNet& policy = r.policy;
  const EvalReport report =
      Evaluate("bc", [&](std::uint64_t) { return policy.AsPolicy(); }, spec, seeds);
  EXPECT_GE(report.performance, 0.9);
}

TEST(Report, TeacherIsOneRandomIsZero) {
  const env::EnvSpec spec = env::MakeSpec("double-integrator");
  const auto seeds = Range(1000, 50);
  const env::Policy teacher = env::TeacherPolicy(spec);
  EXPECT_EQ(Evaluate("teacher", [&](std::uint64_t) { return teacher; }, spec, seeds).performance,
            1.0);
  EXPECT_EQ(Evaluate("random", RandomPolicyFactory(spec), spec, seeds).performance, 0.0);
}

TEST(Report, JsonRoundTripAndCv) {
  const env::EnvSpec spec = env::MakeSpec("pendulum");
  const auto seeds = Range(7, 9);
  const env::Policy zero = env::ZeroPolicy(spec);
  const EvalReport r = Evaluate("zero", [&](std::uint64_t) { return zero; }, spec, seeds);
  EXPECT_NEAR(r.cv, r.aer_std / std::fabs(r.aer_mean), 1e-15);
  EXPECT_EQ(r.n_seeds, 9u);
  EXPECT_EQ(r.seed_digest, SeedDigest(seeds));
  EXPECT_EQ(ReportFromJson(ReportToJson(r)), r);
  EXPECT_NE(SeedDigest(Range(7, 9)), SeedDigest(Range(8, 9)));
  EXPECT_THROW(ReportFromJson("{"), ParseError);
}

}  // namespace
}  // namespace ilfo::eval
