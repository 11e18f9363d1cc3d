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

#include "ilfo/models/models.h"

#include <Eigen/Core>
#include <cmath>
#include <utility>

#include "ilfo/errors.h"

namespace ilfo::models {
namespace {

using RowMajor =
    Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

void InitUniform(ad::Tensor& t, std::size_t fan_in, CounterRng& rng) {
  const double bound = 1.0 / std::sqrt(static_cast<double>(fan_in));
  for (double& v : t.values()) v = rng.Uniform(-bound, bound);
}

void CheckDim(std::string_view what, std::size_t got, std::size_t want) {
  if (got != want) {
    throw DimensionError(std::string(what) + " has dimension " +
                         std::to_string(got) + ", expected " + std::to_string(want));
  }
}

std::vector<std::size_t> Widths(std::size_t in, const std::vector<std::size_t>& hidden,
                                std::size_t out) {
  std::vector<std::size_t> w{in};
  w.insert(w.end(), hidden.begin(), hidden.end());
  w.push_back(out);
  return w;
}

}  // namespace

// ---- Mlp --------------------------------------------------------------------

Mlp::Mlp(std::string prefix, std::vector<std::size_t> widths, Output output,
         std::uint64_t seed)
    : prefix_(std::move(prefix)),
      widths_(std::move(widths)),
      output_(output),
      params_(prefix_) {
  if (widths_.size() < 2) throw ContractError("an MLP needs at least two widths");
  CounterRng rng(seed, "init." + prefix_);
  for (std::size_t l = 0; l + 1 < widths_.size(); ++l) {
    ad::Tensor w({widths_[l], widths_[l + 1]});
    ad::Tensor b({1, widths_[l + 1]});
    InitUniform(w, widths_[l], rng);
    InitUniform(b, widths_[l], rng);
    params_.Add(WeightName(l), std::move(w));
    params_.Add(BiasName(l), std::move(b));
  }
}

std::string Mlp::WeightName(std::size_t layer) const {
  return prefix_ + ".fc" + std::to_string(layer) + ".weight";
}
std::string Mlp::BiasName(std::size_t layer) const {
  return prefix_ + ".fc" + std::to_string(layer) + ".bias";
}

ad::Var Mlp::Forward(ad::Graph& g, ad::Var x) const {
  CheckDim(prefix_ + " input", x.shape().cols, widths_.front());
  const std::size_t layers = widths_.size() - 1;
  for (std::size_t l = 0; l < layers; ++l) {
    x = ad::MatMul(x, g.Parameter(params_, WeightName(l))) +
        g.Parameter(params_, BiasName(l));
    if (l + 1 < layers || output_ == Output::kTanh) x = ad::Tanh(x);
  }
  return x;
}

std::vector<double> Mlp::Apply(std::span<const double> x) const {
  CheckDim(prefix_ + " input", x.size(), widths_.front());
  RowMajor h = Eigen::Map<const RowMajor>(x.data(), 1, static_cast<Eigen::Index>(x.size()));
  const std::size_t layers = widths_.size() - 1;
  for (std::size_t l = 0; l < layers; ++l) {
    const ad::Tensor& w = params_.Get(WeightName(l));
    const ad::Tensor& b = params_.Get(BiasName(l));
    Eigen::Map<const RowMajor> wm(w.values().data(), static_cast<Eigen::Index>(w.rows()),
                                  static_cast<Eigen::Index>(w.cols()));
    Eigen::Map<const RowMajor> bm(b.values().data(), 1, static_cast<Eigen::Index>(b.cols()));
    RowMajor next = h * wm;
    next += bm;
    if (l + 1 < layers || output_ == Output::kTanh) {
      next = next.array().tanh().matrix();
    }
    h = std::move(next);
  }
  return std::vector<double>(h.data(), h.data() + h.size());
}

void Mlp::ZeroOutputLayer() {
  const std::size_t last = widths_.size() - 2;
  for (double& v : params_.MutableValues(WeightName(last))) v = 0.0;
  for (double& v : params_.MutableValues(BiasName(last))) v = 0.0;
}

// ---- PolicyNet ----------------------------------------------------------------

PolicyNet::PolicyNet(std::size_t state_dim, std::size_t action_dim,
                     std::vector<std::size_t> hidden, std::uint64_t seed)
    : state_dim_(state_dim),
      action_dim_(action_dim),
      mlp_("policy", Widths(state_dim, hidden, action_dim), Mlp::Output::kTanh, seed) {}

ad::Var PolicyNet::Forward(ad::Graph& g, ad::Var states) const {
  return mlp_.Forward(g, states);
}

std::vector<double> PolicyNet::Act(std::span<const double> state) const {
  return mlp_.Apply(state);
}

env::Policy PolicyNet::AsPolicy() const {
  return [this](std::span<const double> s) { return Act(s); };
}

// ---- GeneratorNet -----------------------------------------------------------

GeneratorNet::GeneratorNet(std::size_t state_dim, std::size_t action_dim,
                           std::vector<std::size_t> hidden, std::uint64_t seed)
    : state_dim_(state_dim),
      action_dim_(action_dim),
      mlp_("generator", Widths(state_dim + action_dim, hidden, state_dim),
           Mlp::Output::kLinear, seed) {}

ad::Var GeneratorNet::Forward(ad::Graph& g, ad::Var states, ad::Var actions) const {
  CheckDim("generator state", states.shape().cols, state_dim_);
  CheckDim("generator action", actions.shape().cols, action_dim_);
  return mlp_.Forward(g, ad::ConcatCols({states, actions}));
}

std::vector<double> GeneratorNet::Predict(std::span<const double> state,
                                          std::span<const double> action) const {
  CheckDim("generator state", state.size(), state_dim_);
  CheckDim("generator action", action.size(), action_dim_);
  std::vector<double> x(state.begin(), state.end());
  x.insert(x.end(), action.begin(), action.end());
  return mlp_.Apply(x);
}

// ---- DiscriminatorNet -------------------------------------------------------

DiscriminatorNet::DiscriminatorNet(std::size_t delta_dim, DiscriminatorConfig config,
                                   std::uint64_t seed)
    : delta_dim_(delta_dim), config_(config), params_("discriminator") {
  if (config_.lstm_layers == 0 || config_.lstm_hidden == 0 || config_.head_width == 0) {
    throw ContractError("discriminator sizes must be positive");
  }
  if (!(config_.dropout >= 0.0 && config_.dropout < 1.0)) {
    throw ContractError("discriminator dropout must be in [0, 1)");
  }
  CounterRng rng(seed, "init.discriminator");
  const std::size_t h = config_.lstm_hidden;
  for (std::size_t l = 0; l < config_.lstm_layers; ++l) {
    const std::string p = "discriminator.lstm" + std::to_string(l);
    const std::size_t in = l == 0 ? delta_dim_ : h;
    ad::Tensor wi({in, 4 * h}), wh({h, 4 * h}), b({1, 4 * h});
    InitUniform(wi, h, rng);
    InitUniform(wh, h, rng);
    InitUniform(b, h, rng);
    params_.Add(p + ".w_input", std::move(wi));
    params_.Add(p + ".w_hidden", std::move(wh));
    params_.Add(p + ".bias", std::move(b));
  }
  ad::Tensor w0({h, config_.head_width}), b0({1, config_.head_width});
  ad::Tensor w1({config_.head_width, 1}), b1({1, 1});
  InitUniform(w0, h, rng);
  InitUniform(b0, h, rng);
  InitUniform(w1, config_.head_width, rng);
  InitUniform(b1, config_.head_width, rng);
  params_.Add("discriminator.head0.weight", std::move(w0));
  params_.Add("discriminator.head0.bias", std::move(b0));
  params_.Add("discriminator.head1.weight", std::move(w1));
  params_.Add("discriminator.head1.bias", std::move(b1));
}

ad::Var DiscriminatorNet::Encode(ad::Graph& g, ad::Var deltas) const {
  if (deltas.shape().rows == 0) throw EmptyInputError("empty delta sequence");
  CheckDim("delta", deltas.shape().cols, delta_dim_);
  const std::size_t h = config_.lstm_hidden;
  const std::size_t steps = deltas.shape().rows;
  ad::Var layer_input = deltas;
  ad::Var last;
  for (std::size_t l = 0; l < config_.lstm_layers; ++l) {
    const std::string p = "discriminator.lstm" + std::to_string(l);
    const ad::LstmWeights w{g.Parameter(params_, p + ".w_input"),
                            g.Parameter(params_, p + ".w_hidden"),
                            g.Parameter(params_, p + ".bias")};
    ad::LstmState state{g.Constant(ad::Tensor({1, h})), g.Constant(ad::Tensor({1, h}))};
    std::vector<ad::Var> outputs;
    const bool keep_outputs = l + 1 < config_.lstm_layers;
    for (std::size_t t = 0; t < steps; ++t) {
      state = ad::LstmCell(ad::SliceRows(layer_input, t, 1), state, w);
      if (keep_outputs) outputs.push_back(state.h);
    }
    last = state.h;
    if (keep_outputs) layer_input = ad::ConcatRows(outputs);
  }
  return last;
}

ad::Var DiscriminatorNet::Forward(ad::Graph& g, ad::Var deltas, bool train_mode,
                                  CounterRng* rng) const {
  ad::Var x = Encode(g, deltas);
  x = ad::MatMul(x, g.Parameter(params_, "discriminator.head0.weight")) +
      g.Parameter(params_, "discriminator.head0.bias");
  x = ad::LeakyRelu(x, 0.01);
  if (train_mode && config_.dropout > 0.0) {
    if (rng == nullptr) throw ContractError("train-mode dropout needs an rng stream");
    x = ad::Dropout(x, ad::DropoutMask(x.shape(), config_.dropout, *rng), config_.dropout);
  }
  x = ad::MatMul(x, g.Parameter(params_, "discriminator.head1.weight")) +
      g.Parameter(params_, "discriminator.head1.bias");
  // keeps log D and log(1 - D) finite when the logit is large
  constexpr double kFloor = 1e-12;
  return ad::AddScalar(ad::Scale(ad::Sigmoid(x), 1.0 - 2.0 * kFloor), kFloor);
}

double DiscriminatorNet::Probability(const data::DeltaSequence& seq, bool train_mode,
                                     CounterRng* rng) const {
  ad::Graph g;
  return Forward(g, g.Constant(ToTensor(seq)), train_mode, rng).value().item();
}

ad::Tensor ToTensor(const data::DeltaSequence& seq) {
  if (seq.deltas.empty()) throw EmptyInputError("empty delta sequence");
  return ad::Tensor::FromRows(seq.deltas);
}

// ---- FreezeGuard ------------------------------------------------------------

FreezeGuard::FreezeGuard(ad::ParameterSet& target)
    : target_(&target), snapshot_(target.Hash()) {
  for (const auto& n : target.names()) flags_.push_back(target.trainable(n));
  target.SetAllTrainable(false);
}

FreezeGuard::FreezeGuard(FreezeGuard&& other) noexcept
    : target_(other.target_),
      snapshot_(other.snapshot_),
      flags_(std::move(other.flags_)),
      released_(other.released_) {
  other.released_ = true;
}

FreezeGuard::~FreezeGuard() {
  if (!released_) RestoreFlags();
}

void FreezeGuard::RestoreFlags() {
  const auto& names = target_->names();
  for (std::size_t i = 0; i < names.size(); ++i) {
    target_->SetTrainable(names[i], flags_[i]);
  }
}

void FreezeGuard::Verify() const {
  if (target_->Hash() != snapshot_) {
    throw FrozenViolationError("frozen parameter set '" + target_->name() +
                               "' was modified");
  }
}

void FreezeGuard::Release() {
  if (released_) return;
  released_ = true;
  RestoreFlags();
  Verify();
}

}  // namespace ilfo::models
