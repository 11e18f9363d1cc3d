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

#include "ilfo/eval/oracles.h"

#include <algorithm>
#include <numeric>

#include "ilfo/autodiff/optim.h"
#include "ilfo/errors.h"
#include "ilfo/random.h"

namespace ilfo::eval {

double OptimalDiscriminatorOracle(double p_teacher, double p_agent) {
  if (p_teacher < 0.0 || p_agent < 0.0) throw ContractError("densities must be >= 0");
  if (p_teacher + p_agent == 0.0) throw DegenerateError("both densities are zero");
  return p_teacher / (p_teacher + p_agent);
}

ad::GradientMap FiniteDifferenceGradient(const std::function<double()>& loss,
                                         ad::ParameterSet& params, double h) {
  if (!(h > 0.0)) throw ContractError("finite-difference step must be > 0");
  ad::GradientMap out;
  for (const auto& name : params.names()) {
    ad::Tensor grad(params.Get(name).shape());
    std::span<double> x = params.MutableValues(name);
    for (std::size_t i = 0; i < x.size(); ++i) {
      const double orig = x[i];
      x[i] = orig + h;
      const double up = loss();
      x[i] = orig - h;
      const double down = loss();
      x[i] = orig;
      grad[i] = (up - down) / (2.0 * h);
    }
    out.emplace(name, std::move(grad));
  }
  return out;
}

BcResult BcOracleTrain(const env::EnvSpec& spec, const data::Dataset& dataset,
                       const BcSettings& settings) {
  std::vector<const std::vector<double>*> states, actions;
  for (const auto& traj : dataset.trajectories) {
    if (!traj.actions) throw MissingLabelsError("behavioural cloning needs action labels");
    for (std::size_t t = 0; t < traj.actions->size(); ++t) {
      states.push_back(&traj.states[t]);
      actions.push_back(&(*traj.actions)[t]);
    }
  }
  BcResult result{models::PolicyNet(spec.state_dim, spec.action_dim, settings.hidden,
                                    settings.seed),
                  {}};
  if (settings.epochs > 0 && states.empty()) throw EmptyInputError("no labelled steps");
  if (settings.batch_size == 0) throw ContractError("batch_size must be >= 1");

  ad::AdamState adam;
  const CounterRng shuffle(settings.seed, "shuffle.bc");
  const std::size_t n = states.size();
  for (int e = 0; e < settings.epochs; ++e) {
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    CounterRng rng = shuffle.Fork(static_cast<std::uint64_t>(e));
    rng.Shuffle(order);
    double total = 0.0;
    for (std::size_t begin = 0; begin < n; begin += settings.batch_size) {
      const std::size_t count = std::min(settings.batch_size, n - begin);
      std::vector<std::vector<double>> s_rows, a_rows;
      for (std::size_t r = 0; r < count; ++r) {
        s_rows.push_back(*states[order[begin + r]]);
        a_rows.push_back(*actions[order[begin + r]]);
      }
      ad::Graph g;
      ad::Var s = g.Constant(ad::Tensor::FromRows(s_rows));
      ad::Var a = g.Constant(ad::Tensor::FromRows(a_rows));
      ad::Var loss = ad::Scale(ad::Sum(ad::Square(a - result.policy.Forward(g, s))),
                               1.0 / static_cast<double>(count));
      total += loss.value().item() * static_cast<double>(count);
      g.Backward(loss);
      ad::AdamStep(result.policy.params(), g.ParameterGradients(), adam, settings.lr);
    }
    result.epoch_loss.push_back(total / static_cast<double>(n));
  }
  return result;
}

namespace {

void RequireDoubleIntegrator(const env::EnvSpec& spec) {
  if (spec.kind != env::EnvKind::kDoubleIntegrator2D) {
    throw ContractError("analytic dynamics exist only for the double integrator");
  }
}

}  // namespace

training::DynamicsFn AnalyticDoubleIntegrator(const env::EnvSpec& spec) {
  RequireDoubleIntegrator(spec);
  // Row-vector form s' = s A + a B.
  ad::Tensor a_mat({4, 4});
  for (std::size_t i = 0; i < 4; ++i) a_mat(i, i) = 1.0;
  a_mat(2, 0) = spec.dt;
  a_mat(3, 1) = spec.dt;
  ad::Tensor b_mat({2, 4});
  b_mat(0, 2) = spec.dt;
  b_mat(1, 3) = spec.dt;
  return [a_mat, b_mat](ad::Graph& g, ad::Var s, ad::Var a) {
    return ad::MatMul(s, g.Constant(a_mat)) + ad::MatMul(a, g.Constant(b_mat));
  };
}

std::vector<double> DoubleIntegratorNext(const env::EnvSpec& spec, std::span<const double> s,
                                         std::span<const double> a) {
  RequireDoubleIntegrator(spec);
  if (s.size() != 4 || a.size() != 2) throw DimensionError("expected a 4-d state, 2-d action");
  return {s[0] + s[2] * spec.dt, s[1] + s[3] * spec.dt, s[2] + a[0] * spec.dt,
          s[3] + a[1] * spec.dt};
}

}  // namespace ilfo::eval
