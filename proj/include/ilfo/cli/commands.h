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

#ifndef ILFO_CLI_COMMANDS_H_
#define ILFO_CLI_COMMANDS_H_

#include <filesystem>
#include <ostream>
#include <string>
#include <vector>

#include "ilfo/eval/report.h"
#include "ilfo/training/config.h"
#include "ilfo/training/log.h"

namespace ilfo::cli {

enum ExitCode : int { kOk = 0, kUsage = 2, kNumericAbort = 3 };

// Entry point of the `ilfo` tool. Never throws; failures map to exit codes.
int Main(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

// The same, with argv[0] omitted.
int Run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

// Loads a run directory's config and evaluates one of "stage1", "stage2",
// "teacher" or "random" on its seed-disjoint evaluation seeds.
eval::EvalReport EvaluateRun(const std::filesystem::path& run_dir, const std::string& policy,
                             std::size_t n_seeds);

// Fig.-3-style plot of a training log: losses on a log axis, AER probe below.
std::string TrainingPlot(const training::TrainingLog& log);

}  // namespace ilfo::cli

#endif  // ILFO_CLI_COMMANDS_H_
