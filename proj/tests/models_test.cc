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

#include <algorithm>
#include <cmath>
#include <vector>

#include "gtest/gtest.h"
#include "ilfo/autodiff/optim.h"
#include "ilfo/errors.h"
#include "ilfo/models/models.h"
#include "ilfo/random.h"

namespace ilfo::models {
namespace {

std::vector<double> RandomVector(std::size_t n, CounterRng& rng, double scale = 1.0) {
  std::vector<double> v(n);
  for (double& x : v) x = rng.Uniform(-scale, scale);
  return v;
}

data::DeltaSequence RandomDeltas(std::size_t len, std::size_t dim, CounterRng& rng,
                                 double scale = 1.0) {
  data::DeltaSequence seq;
  for (std::size_t i = 0; i < len; ++i) {
    auto row = RandomVector(dim, rng, scale);
    for (double& x : row) x = std::fabs(x);
    seq.deltas.push_back(row);
  }
  return seq;
}

TEST(Init, UniformFanInBoundsAndNames) {
  const PolicyNet net(4, 2, {8, 6}, 3);
  const auto& p = net.params();
  ASSERT_EQ(p.names().size(), 6u);
  EXPECT_EQ(p.names()[0], "policy.fc0.weight");
  EXPECT_EQ(p.names()[1], "policy.fc0.bias");
  EXPECT_EQ(p.Get("policy.fc0.weight").shape(), (ad::Shape{4, 8}));
  EXPECT_EQ(p.Get("policy.fc2.bias").shape(), (ad::Shape{1, 2}));
  const std::size_t fan_in[3] = {4, 8, 6};
  for (std::size_t l = 0; l < 3; ++l) {
    const double bound = 1.0 / std::sqrt(static_cast<double>(fan_in[l]));
    for (const char* kind : {"weight", "bias"}) {
      const auto& t = p.Get("policy.fc" + std::to_string(l) + "." + kind);
      for (std::size_t i = 0; i < t.size(); ++i) EXPECT_LE(std::fabs(t[i]), bound);
    }
  }
}

TEST(Init, SameSeedBitwiseIdentical) {
  EXPECT_TRUE(PolicyNet(4, 2, {16}, 9).params().SameValues(PolicyNet(4, 2, {16}, 9).params()));
  EXPECT_FALSE(PolicyNet(4, 2, {16}, 9).params().SameValues(PolicyNet(4, 2, {16}, 8).params()));
  EXPECT_TRUE(GeneratorNet(4, 2, {16}, 1).params().SameValues(
      GeneratorNet(4, 2, {16}, 1).params()));
  EXPECT_TRUE(DiscriminatorNet(3, {}, 5).params().SameValues(DiscriminatorNet(3, {}, 5).params()));
}

TEST(Policy, ZeroOutputLayerGivesZero) {
  PolicyNet net(4, 2, {8, 8}, 1);
  net.mlp().ZeroOutputLayer();
  CounterRng rng(1, "s");
  for (int i = 0; i < 20; ++i) {
    EXPECT_EQ(net.Act(RandomVector(4, rng, 5.0)), (std::vector<double>{0.0, 0.0}));
  }
}

TEST(Policy, OutputStrictlyInsideUnitBox) {
  CounterRng rng(2, "bound");
  for (int draw = 0; draw < 100; ++draw) {
    PolicyNet net(4, 2, {8, 8}, rng.NextU64());
    for (double a : net.Act(RandomVector(4, rng, 10.0))) {
      EXPECT_LT(std::fabs(a), 1.0);
    }
  }
}

TEST(Policy, SaturatedOutputStaysInUnitBox) {
  CounterRng rng(2, "saturate");
  for (int draw = 0; draw < 100; ++draw) {
    PolicyNet net(4, 2, {8, 8}, rng.NextU64());
    // blow up the parameters; tanh rounds to +-1 in double precision
    for (const auto& name : net.params().names()) {
      for (double& w : net.params().MutableValues(name)) w *= rng.Uniform(1.0, 50.0);
    }
    for (double a : net.Act(RandomVector(4, rng, 100.0))) {
      EXPECT_LE(std::fabs(a), 1.0);
      EXPECT_FALSE(std::isnan(a));
    }
  }
}

TEST(Policy, DeterministicAndGraphAgreesWithFastPath) {
  const PolicyNet net(4, 2, {8, 8}, 4);
  CounterRng rng(3, "s");
  const auto s = RandomVector(4, rng);
  EXPECT_EQ(net.Act(s), net.Act(s));
  ad::Graph g;
  const ad::Tensor out = net.Forward(g, g.Constant(ad::Tensor::Row(s))).value();
  const auto fast = net.Act(s);
  for (std::size_t i = 0; i < 2; ++i) EXPECT_NEAR(out[i], fast[i], 1e-14);
}

TEST(Policy, DimensionMismatch) {
  const PolicyNet net(4, 2, {8}, 4);
  EXPECT_THROW(net.Act(std::vector<double>(3)), DimensionError);
}

TEST(Generator, ZeroOutputLayerAndDimension) {
  for (auto [n, m] : {std::pair<std::size_t, std::size_t>{4, 2}, {3, 1}}) {
    GeneratorNet net(n, m, {8, 8}, 1);
    CounterRng rng(1, "g");
    EXPECT_EQ(net.Predict(RandomVector(n, rng), RandomVector(m, rng)).size(), n);
    net.mlp().ZeroOutputLayer();
    EXPECT_EQ(net.Predict(RandomVector(n, rng), RandomVector(m, rng)),
              std::vector<double>(n, 0.0));
  }
}

TEST(Generator, LinearHeadIsUnbounded) {
  GeneratorNet net(4, 2, {8}, 1);
  for (double& w : net.params().MutableValues("generator.fc1.bias")) w = 40.0;
  for (double x : net.Predict(std::vector<double>(4), std::vector<double>(2))) {
    EXPECT_GT(x, 30.0);
  }
}

TEST(Generator, DimensionMismatch) {
  const GeneratorNet net(4, 2, {8}, 1);
  EXPECT_THROW(net.Predict(std::vector<double>(4), std::vector<double>(1)), DimensionError);
}

TEST(Discriminator, OutputInOpenUnitInterval) {
  CounterRng rng(4, "d");
  for (int draw = 0; draw < 50; ++draw) {
    DiscriminatorConfig cfg;
    cfg.lstm_layers = 1 + rng.Below(2);
    const DiscriminatorNet d(3, cfg, rng.NextU64());
    const auto seq = RandomDeltas(1 + rng.Below(10), 3, rng);
    CounterRng drop(draw, "drop");
    for (bool train : {false, true}) {
      const double p = d.Probability(seq, train, &drop);
      EXPECT_GT(p, 0.0);
      EXPECT_LT(p, 1.0);
    }
  }
}

TEST(Discriminator, EvalModeDeterministic) {
  const DiscriminatorNet d(3, {}, 5);
  CounterRng rng(5, "s");
  const auto seq = RandomDeltas(8, 3, rng);
  EXPECT_EQ(d.Probability(seq, false, nullptr), d.Probability(seq, false, nullptr));
}

TEST(Discriminator, TrainModeNeedsRngAndReplays) {
  const DiscriminatorNet d(3, {}, 5);
  CounterRng rng(5, "s");
  const auto seq = RandomDeltas(8, 3, rng);
  EXPECT_THROW(d.Probability(seq, true, nullptr), ContractError);
  CounterRng a(1, "drop"), b(1, "drop");
  EXPECT_EQ(d.Probability(seq, true, &a), d.Probability(seq, true, &b));
}

TEST(Discriminator, EmptySequenceRejected) {
  const DiscriminatorNet d(3, {}, 5);
  EXPECT_THROW(d.Probability({}, false, nullptr), EmptyInputError);
}

TEST(Discriminator, ReversalChangesEncoding) {
  CounterRng rng(6, "rev");
  for (int draw = 0; draw < 20; ++draw) {
    const DiscriminatorNet d(2, {}, rng.NextU64());
    data::DeltaSequence seq = RandomDeltas(5, 2, rng);
    data::DeltaSequence rev = seq;
    std::reverse(rev.deltas.begin(), rev.deltas.end());
    ad::Graph g;
    const ad::Tensor h1 = d.Encode(g, g.Constant(ToTensor(seq))).value();
    const ad::Tensor h2 = d.Encode(g, g.Constant(ToTensor(rev))).value();
    EXPECT_FALSE(h1 == h2);
  }
}

TEST(Discriminator, NeverSaturatesForBoundedInputs) {
  CounterRng rng(7, "sat");
  for (int draw = 0; draw < 50; ++draw) {
    DiscriminatorNet d(2, {}, rng.NextU64());
    // adversarially large head weights
    for (const auto& name : d.params().names()) {
      for (double& w : d.params().MutableValues(name)) w *= 20.0;
    }
    const auto seq = RandomDeltas(1 + rng.Below(20), 2, rng, 1e3 / std::sqrt(2.0));
    const double p = d.Probability(seq, false, nullptr);
    EXPECT_GT(p, 0.0);
    EXPECT_LT(p, 1.0);
  }
}

TEST(Freeze, AdamStepLeavesFrozenSetUnchanged) {
  PolicyNet net(4, 2, {8}, 1);
  ad::GradientMap grads;
  for (const auto& name : net.params().names()) {
    grads.emplace(name, ad::Tensor(net.params().Get(name).shape(), 1.0));
  }
  const std::uint64_t before = net.params().Hash();
  FreezeGuard guard = Freeze(net.params());
  ad::AdamState state;
  ad::AdamStep(net.params(), grads, state, 0.1);
  EXPECT_EQ(net.params().Hash(), before);
  EXPECT_NO_THROW(guard.Release());
}

TEST(Freeze, RoundTripRestoresFlags) {
  PolicyNet net(4, 2, {8}, 1);
  net.params().SetTrainable("policy.fc0.bias", false);
  std::vector<bool> flags;
  for (const auto& n : net.params().names()) flags.push_back(net.params().trainable(n));
  {
    FreezeGuard guard = Freeze(net.params());
    for (const auto& n : net.params().names()) EXPECT_FALSE(net.params().trainable(n));
    guard.Release();
  }
  for (std::size_t i = 0; i < flags.size(); ++i) {
    EXPECT_EQ(net.params().trainable(net.params().names()[i]), flags[i]);
  }
  {
    FreezeGuard dropped = Freeze(net.params());
  }
  for (std::size_t i = 0; i < flags.size(); ++i) {
    EXPECT_EQ(net.params().trainable(net.params().names()[i]), flags[i]);
  }
}

TEST(Freeze, DirectMutationDetected) {
  GeneratorNet net(4, 2, {8}, 1);
  FreezeGuard guard = Freeze(net.params());
  net.params().MutableValues("generator.fc0.weight")[0] += 1e-12;
  EXPECT_THROW(guard.Verify(), FrozenViolationError);
  EXPECT_THROW(guard.Release(), FrozenViolationError);
  EXPECT_TRUE(net.params().trainable("generator.fc0.weight"));
}

}  // namespace
}  // namespace ilfo::models
