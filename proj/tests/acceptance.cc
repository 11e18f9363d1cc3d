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

// acceptance checks 1-9; prints one PASS/FAIL line per criterion.
// usage: acceptance [work_dir]

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "ilfo/autodiff/checkpoint.h"
#include "ilfo/autodiff/graph.h"
#include "ilfo/autodiff/optim.h"
#include "ilfo/cli/commands.h"
#include "ilfo/data/dataset.h"
#include "ilfo/env/env.h"
#include "ilfo/eval/metrics.h"
#include "ilfo/eval/oracles.h"
#include "ilfo/eval/report.h"
#include "ilfo/models/models.h"
#include "ilfo/random.h"
#include "ilfo/training/config.h"
#include "ilfo/training/log.h"
#include "ilfo/training/trainer.h"

namespace {

using namespace ilfo;
namespace fs = std::filesystem;
using Clock = std::chrono::steady_clock;

int failures = 0;

void Report(int id, bool pass, const std::string& detail, double seconds) {
  char buf[64];
  std::snprintf(buf, sizeof buf, " (%.1fs)", seconds);
  std::cout << (pass ? "PASS" : "FAIL") << " criterion " << id << ": " << detail << buf
            << std::endl;
  if (!pass) ++failures;
}

double Since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::string Num(double v, int digits = 4) {
  char buf[48];
  std::snprintf(buf, sizeof buf, "%.*g", digits, v);
  return buf;
}

std::string Slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), {}};
}

int Cli(const std::vector<std::string>& args) {
  std::ostringstream out, err;
  const int code = cli::Run(args, out, err);
  if (code != 0) std::cerr << "ilfo " << args[0] << " failed (" << code << "): " << err.str();
  return code;
}

ad::Tensor RandomTensor(ad::Shape shape, CounterRng& rng) {
  ad::Tensor t(shape);
  for (std::size_t i = 0; i < t.size(); ++i) t[i] = rng.Uniform(-1.0, 1.0);
  return t;
}

// worst per-tensor norm-wise relative error between autodiff and differences
double GradientError(const std::function<ad::Var(ad::Graph&)>& loss, ad::ParameterSet& params) {
  ad::Graph g;
  ad::Var l = loss(g);
  g.Backward(l);
  const ad::GradientMap analytic = g.ParameterGradients();
  const ad::GradientMap numeric = eval::FiniteDifferenceGradient(
      [&] {
        ad::Graph h;
        return loss(h).value().item();
      },
      params, 1e-5);
  double worst = 0.0;
  for (const auto& name : params.names()) {
    const ad::Tensor& a = analytic.at(name);
    const ad::Tensor& n = numeric.at(name);
    double diff = 0.0, na = 0.0, nn = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
      diff += (a[i] - n[i]) * (a[i] - n[i]);
      na += a[i] * a[i];
      nn += n[i] * n[i];
    }
    const double scale = std::max({std::sqrt(na), std::sqrt(nn), 1e-8});
    worst = std::max(worst, std::sqrt(diff) / scale);
  }
  return worst;
}

std::vector<std::size_t> RandomWidths(CounterRng& rng) {
  std::vector<std::size_t> w(1 + rng.Below(3));
  for (auto& x : w) x = 2 + rng.Below(7);
  return w;
}

void Criterion1() {
  const auto t0 = Clock::now();
  CounterRng rng(11, "acceptance.gradients");
  double worst_policy = 0.0, worst_generator = 0.0, worst_discriminator = 0.0;
  for (int i = 0; i < 100; ++i) {
    const std::size_t n = 1 + rng.Below(5), m = 1 + rng.Below(3), rows = 1 + rng.Below(6);
    models::PolicyNet policy(n, m, RandomWidths(rng), rng.Below(1u << 30));
    const ad::Tensor s = RandomTensor({rows, n}, rng), w = RandomTensor({rows, m}, rng);
    worst_policy = std::max(
        worst_policy, GradientError(
                          [&](ad::Graph& g) {
                            return ad::Sum(policy.Forward(g, g.Constant(s)) * g.Constant(w));
                          },
                          policy.params()));

    models::GeneratorNet generator(n, m, RandomWidths(rng), rng.Below(1u << 30));
    const ad::Tensor a = RandomTensor({rows, m}, rng), v = RandomTensor({rows, n}, rng);
    worst_generator = std::max(
        worst_generator,
        GradientError(
            [&](ad::Graph& g) {
              return ad::Sum(generator.Forward(g, g.Constant(s), g.Constant(a)) * g.Constant(v));
            },
            generator.params()));

    models::DiscriminatorConfig dc;
    dc.lstm_hidden = 2 + rng.Below(5);
    dc.lstm_layers = 1 + rng.Below(2);
    dc.head_width = 2 + rng.Below(7);
    dc.dropout = 0.5;
    models::DiscriminatorNet disc(n, dc, rng.Below(1u << 30));
    const ad::Tensor seq = RandomTensor({1 + rng.Below(5), n}, rng);
    worst_discriminator = std::max(
        worst_discriminator,
        GradientError(
            [&](ad::Graph& g) { return ad::Log(disc.Forward(g, g.Constant(seq), false, nullptr)); },
            disc.params()));
  }
  const double worst = std::max({worst_policy, worst_generator, worst_discriminator});
  const double seconds = Since(t0);
  Report(1, worst < 1e-4 && seconds < 60.0,
         "max relative gradient error policy " + Num(worst_policy, 3) + ", generator " +
             Num(worst_generator, 3) + ", discriminator " + Num(worst_discriminator, 3) +
             " over 100 configurations each (< 1e-4)",
         seconds);
}

void Criterion3() {
  const auto t0 = Clock::now();
  const std::vector<double> p_teacher{0.4, 0.3, 0.2, 0.1};
  const std::vector<double> p_agent{0.1, 0.2, 0.3, 0.4};
  const std::size_t dim = 4, steps = 6;
  std::vector<ad::Tensor> support;
  CounterRng rng(13, "acceptance.support");
  for (std::size_t k = 0; k < p_teacher.size(); ++k) {
    ad::Tensor seq({steps, dim});
    for (std::size_t i = 0; i < seq.size(); ++i) seq[i] = rng.Uniform(0.0, 0.2);
    support.push_back(seq);
  }

  models::DiscriminatorConfig dc;
  dc.dropout = 0.0;
  models::DiscriminatorNet disc(dim, dc, 13);
  ad::AdamState adam;
  for (int it = 0; it < 2000; ++it) {
    ad::Graph g;
    std::vector<ad::Var> terms;
    for (std::size_t k = 0; k < support.size(); ++k) {
      const ad::Var d = disc.Forward(g, g.Constant(support[k]), false, nullptr);
      terms.push_back(ad::Scale(ad::Log(d), -p_teacher[k]));
      terms.push_back(ad::Scale(ad::Log(1.0 - d), -p_agent[k]));
    }
    ad::Var loss = terms[0];
    for (std::size_t k = 1; k < terms.size(); ++k) loss = loss + terms[k];
    g.Backward(loss);
    ad::AdamStep(disc.params(), g.ParameterGradients(), adam, 1e-3);
  }

  double worst = 0.0;
  std::string values;
  for (std::size_t k = 0; k < support.size(); ++k) {
    ad::Graph g;
    const double d = disc.Forward(g, g.Constant(support[k]), false, nullptr).value().item();
    const double target = eval::OptimalDiscriminatorOracle(p_teacher[k], p_agent[k]);
    worst = std::max(worst, std::fabs(d - target));
    values += (k ? ", " : "") + Num(d, 3) + "/" + Num(target, 3);
  }
  const double seconds = Since(t0);
  Report(3, worst < 0.05 && seconds < 120.0,
         "D vs optimal [" + values + "], max abs error " + Num(worst, 3) + " (< 0.05)", seconds);
}

void Criterion7() {
  const auto t0 = Clock::now();
  const double p = eval::Performance(3573.4266, 18.8985, 3530.2857);
  const double cv = eval::CoefficientOfVariation(9512.2995, 538.5918);
  const env::EnvSpec spec = env::MakeSpec("double-integrator");
  const data::Dataset ds = data::GenerateTeacherDataset(spec, 700, 0);
  const auto seeds = eval::DisjointEvalSeeds(spec, ds, eval::StateSet(), 200);
  const env::Policy teacher = env::TeacherPolicy(spec);
  const double p_teacher =
      eval::Evaluate("teacher", [&](std::uint64_t) { return teacher; }, spec, seeds).performance;
  const double p_random =
      eval::Evaluate("random", eval::RandomPolicyFactory(spec), spec, seeds).performance;
  const bool pass = std::fabs(p - 1.0127) <= 0.01 && std::fabs(100.0 * cv - 5.66) <= 0.01 &&
                    p_teacher == 1.0 && p_random == 0.0;
  Report(7, pass,
         "performance " + Num(p, 6) + ", CV " + Num(100.0 * cv, 5) + "%, P(teacher) " +
             Num(p_teacher) + ", P(random) " + Num(p_random),
         Since(t0));
}

ad::Checkpoint ReadCkpt(const fs::path& p) { return ad::Checkpoint::Read(p); }

training::Models ModelsFrom(const training::ExperimentConfig& config, const fs::path& ckpt) {
  training::Models m = training::Models::Create(config, training::SpecFor(config));
  m.Restore(ReadCkpt(ckpt));
  return m;
}

void EndToEnd(const fs::path& work) {
  const training::ExperimentConfig config;
  const fs::path run_a = work / "run_a", run_b = work / "run_b";
  SaveConfig(config, work / "default.json");

  auto t0 = Clock::now();
  const int code = Cli({"train", "--config", (work / "default.json").string(), "--out",
                        run_a.string(), "--quiet"});
  const double train_seconds = Since(t0);
  if (code != 0) {
    for (int id : {2, 4, 5, 6, 8}) Report(id, false, "training run failed", train_seconds);
    return;
  }
  const env::EnvSpec spec = training::SpecFor(config);
  const training::Models stage1 = ModelsFrom(config, run_a / "stage1.ckpt");
  const training::Models stage2 = ModelsFrom(config, run_a / "stage2.ckpt");
  const training::TrainingLog log = training::TrainingLog::Read(run_a / "training_log.csv");
  const auto stage1_records = log.ForStage(training::Stage::kReconstruction);
  double stage1_seconds = train_seconds;
  if (!log.records.empty()) {
    stage1_seconds *= static_cast<double>(stage1_records.size()) /
                      static_cast<double>(log.records.size());
  }

  // 2: generator vs the analytic transition on held-out on-policy play
  t0 = Clock::now();
  double sq = 0.0;
  std::size_t count = 0;
  const env::Policy policy = stage1.policy.AsPolicy();
  for (std::uint64_t seed = 5000000; count < 1000 * spec.state_dim; ++seed) {
    const data::Trajectory t = env::Rollout(spec, policy, seed, true);
    for (std::size_t k = 0; k < t.length() && count < 1000 * spec.state_dim; ++k) {
      const auto& s = t.states[k];
      const auto& a = (*t.actions)[k];
      const auto predicted = stage1.generator.Predict(s, a);
      const auto actual = eval::DoubleIntegratorNext(spec, s, a);
      for (std::size_t j = 0; j < s.size(); ++j, ++count) {
        sq += (predicted[j] - actual[j]) * (predicted[j] - actual[j]);
      }
    }
  }
  const double rms = std::sqrt(sq / static_cast<double>(count));
  Report(2, rms < 1e-2 && stage1_seconds < 600.0,
         "generator one-step RMS " + Num(rms, 3) + " on 1000 held-out transitions (< 1e-2)",
         stage1_seconds + Since(t0));

  // 4: stage-1 performance on seed-disjoint evaluation
  t0 = Clock::now();
  const eval::EvalReport r1 = cli::EvaluateRun(run_a, "stage1", config.eval_seeds);
  const eval::EvalReport r2 = cli::EvaluateRun(run_a, "stage2", config.eval_seeds);
  const bool dominance = r1.aer_teacher > r1.aer_random;
  const double eval_seconds = Since(t0);
  Report(4, dominance && r1.performance >= 0.9 && stage1_seconds < 900.0,
         std::string("teacher AER ") + Num(r1.aer_teacher) + " > random AER " +
             Num(r1.aer_random) + (dominance ? " holds" : " FAILS") + "; stage-1 P " +
             Num(r1.performance) + " on " + std::to_string(r1.n_seeds) + " seeds (>= 0.9)",
         stage1_seconds + eval_seconds / 2);

  // 5: adversarial refinement keeps performance and the generator
  const bool frozen = stage1.generator.params().Hash() == stage2.generator.params().Hash() &&
                      stage1.generator.params().SameValues(stage2.generator.params());
  const bool kept = r2.performance >= 0.95 * r1.performance;
  Report(5, frozen && kept && config.epochs_a <= 10 && train_seconds - stage1_seconds < 300.0,
         "stage-2 P " + Num(r2.performance) + " vs stage-1 " + Num(r1.performance) +
             " after " + std::to_string(config.epochs_a) + " adversarial epochs; generator " +
             (frozen ? "unchanged" : "CHANGED"),
         train_seconds - stage1_seconds + eval_seconds / 2);

  // 6: policy loss tracks generator error during reconstruction
  std::vector<double> policy_loss, gen_eval;
  for (const auto& r : stage1_records) {
    policy_loss.push_back(r.policy_loss);
    gen_eval.push_back(r.gen_loss_eval);
  }
  const double rho = training::Pearson(policy_loss, gen_eval);
  Report(6, rho > 0.0,
         "Pearson(policy loss, generator eval loss) = " + Num(rho) + " over " +
             std::to_string(policy_loss.size()) + " epochs (> 0)",
         0.0);

  // 8: a second run from the same config
  t0 = Clock::now();
  const int code_b = Cli({"train", "--config", (work / "default.json").string(), "--out",
                          run_b.string(), "--quiet"});
  bool identical = code_b == 0;
  std::string differing;
  for (const char* f : {"stage1.ckpt", "stage2.ckpt", "eval_report.json", "training_log.csv"}) {
    if (Slurp(run_a / f) != Slurp(run_b / f)) {
      identical = false;
      differing += std::string(" ") + f;
    }
  }
  Report(8, identical,
         identical ? "two runs produced bitwise-identical checkpoints, logs and reports"
                   : "runs differ in:" + differing,
         Since(t0));
}

void Criterion9(const fs::path& work) {
  const auto t0 = Clock::now();
  const fs::path out = work / "sweep";
  const int code = Cli({"sweep", "--config", (work / "default.json").string(), "--counts",
                        "10,50,200,700", "--out", out.string()});
  const double seconds = Since(t0);
  if (code != 0) {
    Report(9, false, "sweep failed", seconds);
    return;
  }
  std::istringstream csv(Slurp(out / "sweep.csv"));
  std::string line;
  std::getline(csv, line);
  std::vector<double> counts, aer;
  while (std::getline(csv, line)) {
    std::istringstream row(line);
    std::string cell;
    std::getline(row, cell, ',');
    counts.push_back(std::stod(cell));
    std::getline(row, cell, ',');
    aer.push_back(std::stod(cell));
  }
  bool monotone = aer.size() == 4;
  std::string values;
  for (std::size_t i = 0; i < aer.size(); ++i) {
    values += (i ? ", " : "") + Num(counts[i], 4) + ": " + Num(aer[i], 5);
    if (i > 0 && counts[i] <= 200 && aer[i] < aer[i - 1]) monotone = false;
  }
  const std::string svg = Slurp(out / "sweep.svg");
  const bool emitted = svg.find("<svg") != std::string::npos && !values.empty();
  Report(9, monotone && emitted && seconds < 2400.0,
         "AER by trajectories {" + values + "}; non-decreasing 10..200: " +
             (monotone ? "yes" : "no") + "; csv and svg " + (emitted ? "written" : "MISSING"),
         seconds);
}

}  // namespace

int main(int argc, char** argv) {
  const fs::path work =
      argc > 1 ? fs::path(argv[1]) : fs::temp_directory_path() / "ilfo_acceptance";
  fs::remove_all(work);
  fs::create_directories(work);

  Criterion1();
  Criterion3();
  Criterion7();
  EndToEnd(work);
  Criterion9(work);

  std::cout << (failures == 0 ? "all criteria passed" : std::to_string(failures) + " failed")
            << std::endl;
  return failures == 0 ? 0 : 1;
}
