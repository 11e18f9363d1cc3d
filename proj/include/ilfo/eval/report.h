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

#ifndef ILFO_EVAL_REPORT_H_
#define ILFO_EVAL_REPORT_H_

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "ilfo/data/dataset.h"
#include "ilfo/eval/metrics.h"
#include "ilfo/training/config.h"

namespace ilfo::eval {

struct EvalReport {
  std::string policy;
  std::string env;
  double aer_mean = 0.0;
  double aer_std = 0.0;
  double cv = 0.0;  // NaN when aer_mean == 0
  double performance = 0.0;
  double aer_teacher = 0.0;
  double aer_random = 0.0;
  std::size_t n_seeds = 0;
  std::uint64_t first_seed = 0;
  std::uint64_t last_seed = 0;
  std::string seed_digest;

  bool operator==(const EvalReport&) const = default;
};

// 16 hex digits of FNV-1a over the little-endian seeds.
std::string SeedDigest(std::span<const std::uint64_t> seeds);

// Evaluates `policy` and both baselines on the same seeds.
EvalReport Evaluate(std::string_view name, const PolicyFactory& policy,
                    const env::EnvSpec& spec, std::span<const std::uint64_t> seeds);

// Reset states of every seed the agent plays on during training.
StateSet OnlineInitialStates(const training::ExperimentConfig& config,
                             const env::EnvSpec& spec);

// Seed-disjoint evaluation seeds for a run of `config` on `dataset`.
std::vector<std::uint64_t> EvalSeedsFor(const training::ExperimentConfig& config,
                                        const data::Dataset& dataset, std::size_t n);

std::string ReportToJson(const EvalReport& report);
EvalReport ReportFromJson(std::string_view text);
void WriteReport(const EvalReport& report, const std::filesystem::path& path);

// "name  AER mean ± std  P  CV%".
std::string FormatRow(const EvalReport& report);

}  // namespace ilfo::eval

#endif  // ILFO_EVAL_REPORT_H_
