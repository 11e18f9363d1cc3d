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

#include "ilfo/cli/commands.h"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <limits>
#include <mutex>
#include <sstream>
#include <thread>

#include "CLI11.hpp"
#include "ilfo/cli/svg.h"
#include "ilfo/data/dataset.h"
#include "ilfo/env/env.h"
#include "ilfo/errors.h"
#include "ilfo/random.h"
#include "ilfo/training/trainer.h"
#include "json.hpp"

namespace ilfo::cli {
namespace fs = std::filesystem;

namespace {

// Reported as exit code 2.
class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

std::string Fixed(double v, int digits = 4) {
  char buf[48];
  std::snprintf(buf, sizeof buf, "%.*f", digits, v);
  return buf;
}

void WriteText(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw UsageError("cannot write " + path.string());
  out << text;
  if (!out) throw UsageError("failed writing " + path.string());
}

void MakeDirs(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw UsageError("cannot create " + dir.string() + ": " + ec.message());
}

std::string EpochLine(const training::EpochRecord& r) {
  std::string line = "epoch " + std::to_string(r.epoch) + " " +
                     std::string(training::StageName(r.stage)) +
                     " policy_loss=" + Fixed(r.policy_loss, 6) +
                     " gen_train=" + Fixed(r.gen_loss_train, 8) +
                     " gen_eval=" + Fixed(r.gen_loss_eval, 8);
  if (std::isfinite(r.aer_probe)) line += " aer=" + Fixed(r.aer_probe, 3);
  return line;
}

std::string DatasetRef(const training::ExperimentConfig& config, const data::Dataset& dataset) {
  nlohmann::ordered_json j;
  j["source"] = config.dataset_path.empty() ? "generated" : config.dataset_path;
  j["env"] = dataset.env_name;
  j["teacher"] = dataset.teacher;
  j["n_trajectories"] = dataset.trajectories.size();
  j["digest"] = eval::SeedDigest(std::vector<std::uint64_t>{
      Fnv1a(data::SerializeDataset(dataset))});
  return j.dump(2) + "\n";
}

data::Dataset FirstTrajectories(const data::Dataset& full, std::size_t n) {
  if (n > full.trajectories.size()) {
    throw UsageError("dataset has " + std::to_string(full.trajectories.size()) +
                     " trajectories, " + std::to_string(n) + " requested");
  }
  data::Dataset out{full.env_name, full.teacher, {}};
  out.trajectories.assign(full.trajectories.begin(),
                          full.trajectories.begin() + static_cast<std::ptrdiff_t>(n));
  return out;
}

training::Models LoadModels(const training::ExperimentConfig& config, const fs::path& ckpt) {
  if (!fs::exists(ckpt)) throw UsageError("missing checkpoint " + ckpt.string());
  const env::EnvSpec spec = training::SpecFor(config);
  training::Models models = training::Models::Create(config, spec);
  models.Restore(ad::Checkpoint::Read(ckpt));
  return models;
}

// ---- gen-teacher ------------------------------------------------------------

struct GenTeacherArgs {
  std::string env = "double-integrator";
  std::size_t n = 700;
  std::uint64_t seed = 0;
  std::string out;
  int horizon = 100;
  double dt = 0.05;
  bool labelled = false;
};

int GenTeacher(const GenTeacherArgs& a, std::ostream& out) {
  if (a.n == 0) throw UsageError("--n must be >= 1");
  const env::EnvSpec spec = env::MakeSpec(a.env, a.horizon, a.dt);
  const data::Dataset ds = a.labelled ? data::GenerateLabelledTeacherDataset(spec, a.n, a.seed)
                                      : data::GenerateTeacherDataset(spec, a.n, a.seed);
  if (fs::path(a.out).has_parent_path()) MakeDirs(fs::path(a.out).parent_path());
  WriteText(a.out, data::SerializeDataset(ds));
  const env::Policy teacher = env::TeacherPolicy(spec);
  double total = 0.0;
  for (std::size_t i = 0; i < a.n; ++i) total += env::EpisodeReturn(spec, teacher, a.seed + i);
  out << "wrote " << a.n << " trajectories of " << spec.name << " to " << a.out
      << " (mean return " << Fixed(total / static_cast<double>(a.n)) << ")\n";
  return kOk;
}

// ---- train ------------------------------------------------------------------

struct TrainArgs {
  std::string config;
  std::string out;
  std::string dataset;
  bool stage1_only = false;
  bool quiet = false;
};

training::ExperimentConfig ConfigFor(const std::string& path) {
  return path.empty() ? training::ExperimentConfig{} : training::LoadConfig(path);
}

struct RunOutcome {
  eval::EvalReport report;
  training::TrainingLog log;
};

RunOutcome TrainRun(const training::ExperimentConfig& config, const fs::path& run_dir,
                    bool stage1_only, const data::Dataset& dataset,
                    const std::vector<std::uint64_t>& eval_seeds, std::ostream* progress) {
  MakeDirs(run_dir / "plots");
  training::SaveConfig(config, run_dir / "config.json");
  WriteText(run_dir / "dataset_ref.json", DatasetRef(config, dataset));
  fs::remove(run_dir / "stage2.ckpt");

  training::TrainOptions options;
  options.run_dir = run_dir;
  options.stage1_only = stage1_only;
  options.dataset = &dataset;
  if (progress) options.on_epoch = [progress](const auto& r) { *progress << EpochLine(r) << "\n"; };
  training::TrainResult result = training::Train(config, options);
  result.log.Write(run_dir / "training_log.csv");
  WriteText(run_dir / "plots" / "training.svg", TrainingPlot(result.log));

  const env::EnvSpec spec = training::SpecFor(config);
  const models::PolicyNet& policy = result.models.policy;
  RunOutcome outcome;
  outcome.report = eval::Evaluate(stage1_only ? "stage1" : "stage2",
                                  [&policy](std::uint64_t) { return policy.AsPolicy(); }, spec,
                                  eval_seeds);
  eval::WriteReport(outcome.report, run_dir / "eval_report.json");
  outcome.log = std::move(result.log);
  return outcome;
}

int Train(const TrainArgs& a, std::ostream& out) {
  training::ExperimentConfig config = ConfigFor(a.config);
  if (!a.dataset.empty()) config.dataset_path = a.dataset;
  training::ValidateOrThrow(config);
  const data::Dataset dataset = training::TeacherDatasetFor(config);
  const auto seeds = eval::EvalSeedsFor(config, dataset, config.eval_seeds);
  RunOutcome outcome =
      TrainRun(config, a.out, a.stage1_only, dataset, seeds, a.quiet ? nullptr : &out);
  out << eval::FormatRow(outcome.report) << "\n";
  return kOk;
}

// ---- eval -------------------------------------------------------------------

struct EvalArgs {
  std::string run;
  std::size_t n_seeds = 0;
  std::string policy;
};

int Eval(const EvalArgs& a, std::ostream& out) {
  const fs::path run(a.run);
  std::string policy = a.policy;
  if (policy.empty()) policy = fs::exists(run / "stage2.ckpt") ? "stage2" : "stage1";
  const training::ExperimentConfig config = training::LoadConfig(run / "config.json");
  const eval::EvalReport report =
      EvaluateRun(run, policy, a.n_seeds == 0 ? config.eval_seeds : a.n_seeds);
  const bool own = policy == "stage1" || policy == "stage2";
  eval::WriteReport(report, run / (own ? "eval_report.json" : "eval_report_" + policy + ".json"));
  out << eval::FormatRow(report) << "\n";
  return kOk;
}

// ---- sweep ------------------------------------------------------------------

struct SweepArgs {
  std::string config;
  std::vector<std::size_t> counts = {10, 50, 200, 700};
  std::string out;
};

std::size_t SweepThreads(std::size_t jobs) {
  std::size_t n = 1;
  if (const char* env = std::getenv("RUN_THREADS")) {
    char* end = nullptr;
    const unsigned long v = std::strtoul(env, &end, 10);
    if (end == env || *end != '\0' || v == 0) throw UsageError("RUN_THREADS must be >= 1");
    n = v;
  }
  return std::min(n, jobs);
}

int Sweep(const SweepArgs& a, std::ostream& out) {
  if (a.counts.empty()) throw UsageError("--counts must not be empty");
  for (std::size_t i = 0; i < a.counts.size(); ++i) {
    if (a.counts[i] == 0 || (i > 0 && a.counts[i] <= a.counts[i - 1])) {
      throw UsageError("--counts must be positive and increasing");
    }
  }
  const training::ExperimentConfig base = ConfigFor(a.config);
  std::vector<training::ExperimentConfig> configs;
  for (std::size_t n : a.counts) {
    training::ExperimentConfig c = base;
    c.n_teacher_trajectories = n;
    training::ValidateOrThrow(c);
    configs.push_back(c);
  }

  // The largest dataset contains every smaller one, so excluding its initial
  // states gives one evaluation seed list shared by all entries.
  training::ExperimentConfig largest = base;
  largest.n_teacher_trajectories = a.counts.back();
  const data::Dataset full = training::TeacherDatasetFor(largest);
  const auto seeds = eval::EvalSeedsFor(largest, full, base.eval_seeds);

  const fs::path root(a.out);
  MakeDirs(root);
  std::vector<RunOutcome> outcomes(configs.size());
  std::vector<std::exception_ptr> errors(configs.size());
  std::atomic<std::size_t> next{0};
  std::mutex print;
  auto worker = [&] {
    for (std::size_t i; (i = next++) < configs.size();) {
      try {
        const data::Dataset ds = FirstTrajectories(full, a.counts[i]);
        outcomes[i] = TrainRun(configs[i], root / ("n" + std::to_string(a.counts[i])), false,
                               ds, seeds, nullptr);
        std::lock_guard lock(print);
        out << "n=" << a.counts[i] << "  " << eval::FormatRow(outcomes[i].report) << "\n";
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  const std::size_t threads = SweepThreads(configs.size());
  if (threads <= 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (std::size_t t = 0; t < threads; ++t) pool.emplace_back(worker);
  }
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }

  std::string csv = "n_trajectories,aer_mean,aer_std,cv,performance\n";
  std::vector<BarGroup> bars;
  for (std::size_t i = 0; i < a.counts.size(); ++i) {
    const eval::EvalReport& r = outcomes[i].report;
    std::ostringstream row;
    row.precision(17);
    row << a.counts[i] << ',' << r.aer_mean << ',' << r.aer_std << ',' << r.cv << ','
        << r.performance << '\n';
    csv += row.str();
    bars.push_back({std::to_string(a.counts[i]), r.aer_mean, r.aer_std, 100.0 * r.cv});
  }
  WriteText(root / "sweep.csv", csv);
  WriteText(root / "sweep.svg",
            GroupedBarSvg("AER and CV by number of teacher trajectories", "AER", "CV (%)", bars));
  out << "wrote " << (root / "sweep.csv").string() << " and " << (root / "sweep.svg").string()
      << "\n";
  return kOk;
}

// ---- plot -------------------------------------------------------------------

int Plot(const std::string& run_dir, std::ostream& out) {
  const fs::path run(run_dir);
  const fs::path csv = run / "training_log.csv";
  if (!fs::exists(csv)) throw UsageError("missing " + csv.string());
  const training::TrainingLog log = training::TrainingLog::Read(csv);
  if (log.records.empty()) throw UsageError("training log is empty");
  MakeDirs(run / "plots");
  const fs::path svg = run / "plots" / "training.svg";
  WriteText(svg, TrainingPlot(log));
  out << "wrote " << svg.string() << "\n";
  return kOk;
}

}  // namespace

std::string TrainingPlot(const training::TrainingLog& log) {
  Series policy{"policy loss", {}}, gen_train{"generator loss (train)", {}},
      gen_eval{"generator loss (eval)", {}}, aer{"AER probe", {}};
  for (const auto& r : log.records) {
    const double x = r.epoch;
    policy.points.emplace_back(x, r.policy_loss);
    gen_train.points.emplace_back(x, r.gen_loss_train);
    gen_eval.points.emplace_back(x, r.gen_loss_eval);
    aer.points.emplace_back(x, r.aer_probe);
  }
  return LinePlotSvg("Training information", "epoch",
                     {Panel{"loss", true, {policy, gen_train, gen_eval}},
                      Panel{"AER", false, {aer}}});
}

eval::EvalReport EvaluateRun(const fs::path& run_dir, const std::string& policy,
                             std::size_t n_seeds) {
  const fs::path config_path = run_dir / "config.json";
  if (!fs::exists(config_path)) throw UsageError("missing " + config_path.string());
  const training::ExperimentConfig config = training::LoadConfig(config_path);
  const env::EnvSpec spec = training::SpecFor(config);
  const data::Dataset dataset = training::TeacherDatasetFor(config);
  const auto seeds = eval::EvalSeedsFor(config, dataset, n_seeds);
  if (policy == "teacher") {
    const env::Policy teacher = env::TeacherPolicy(spec);
    return eval::Evaluate(policy, [&](std::uint64_t) { return teacher; }, spec, seeds);
  }
  if (policy == "random") return eval::Evaluate(policy, eval::RandomPolicyFactory(spec), spec, seeds);
  if (policy != "stage1" && policy != "stage2") {
    throw UsageError("--policy must be teacher, random, stage1 or stage2");
  }
  const training::Models models = LoadModels(config, run_dir / (policy + ".ckpt"));
  return eval::Evaluate(policy, [&](std::uint64_t) { return models.policy.AsPolicy(); }, spec,
                        seeds);
}

int Main(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Two-stage imitation from state-only demonstrations"};
  app.require_subcommand(1);

  GenTeacherArgs gen;
  auto* gen_cmd = app.add_subcommand("gen-teacher", "Write a scripted-teacher dataset");
  gen_cmd->add_option("--env", gen.env, "Environment name");
  gen_cmd->add_option("--n", gen.n, "Number of trajectories");
  gen_cmd->add_option("--seed", gen.seed, "First episode seed");
  gen_cmd->add_option("--out", gen.out, "Output JSON Lines file")->required();
  gen_cmd->add_option("--horizon", gen.horizon, "Episode length");
  gen_cmd->add_option("--dt", gen.dt, "Time step");
  gen_cmd->add_flag("--with-actions", gen.labelled, "Keep actions and rewards");

  TrainArgs train;
  auto* train_cmd = app.add_subcommand("train", "Run both training stages and evaluate");
  train_cmd->add_option("--config", train.config, "Experiment config (JSON)");
  train_cmd->add_option("--out", train.out, "Run directory")->required();
  train_cmd->add_option("--dataset", train.dataset, "Teacher dataset overriding the config");
  train_cmd->add_flag("--stage1-only", train.stage1_only, "Stop after reconstruction");
  train_cmd->add_flag("--quiet", train.quiet, "No per-epoch output");

  EvalArgs ev;
  auto* eval_cmd = app.add_subcommand("eval", "Evaluate a run on seed-disjoint episodes");
  eval_cmd->add_option("--run", ev.run, "Run directory")->required();
  eval_cmd->add_option("--n-seeds", ev.n_seeds, "Number of evaluation seeds");
  eval_cmd->add_option("--policy", ev.policy, "stage1, stage2, teacher or random");

  SweepArgs sweep;
  auto* sweep_cmd = app.add_subcommand("sweep", "Train and evaluate per dataset size");
  sweep_cmd->add_option("--config", sweep.config, "Experiment config (JSON)");
  sweep_cmd->add_option("--counts", sweep.counts, "Trajectory counts")->delimiter(',');
  sweep_cmd->add_option("--out", sweep.out, "Output directory")->required();

  std::string plot_run;
  auto* plot_cmd = app.add_subcommand("plot", "Plot a run's training log");
  plot_cmd->add_option("--run", plot_run, "Run directory")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kOk : kUsage;
  }

  try {
    if (*gen_cmd) return GenTeacher(gen, out);
    if (*train_cmd) return Train(train, out);
    if (*eval_cmd) return Eval(ev, out);
    if (*sweep_cmd) return Sweep(sweep, out);
    if (*plot_cmd) return Plot(plot_run, out);
  } catch (const NumericError& e) {
    err << "numeric abort: " << e.what() << "\n";
    return kNumericAbort;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kUsage;
  }
  return kUsage;
}

int Run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  std::vector<const char*> argv{"ilfo"};
  for (const auto& a : args) argv.push_back(a.c_str());
  return Main(static_cast<int>(argv.size()), argv.data(), out, err);
}

}  // namespace ilfo::cli
