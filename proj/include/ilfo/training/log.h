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

#ifndef ILFO_TRAINING_LOG_H_
#define ILFO_TRAINING_LOG_H_

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace ilfo::training {

enum class Stage { kReconstruction, kAdversarial };

std::string_view StageName(Stage stage);

// One completed epoch. Epoch indices run over both stages (stage 2
// continues where stage 1 stopped). Unmeasured values are NaN.
struct EpochRecord {
  int epoch = 0;
  Stage stage = Stage::kReconstruction;
  // Stage 1: mean per-pair reconstruction loss on teacher pairs.
  // Stage 2: mean -log D over the agent's delta sequences.
  double policy_loss = 0.0;
  // Generator loss on this epoch's agent rollouts / on hold-out rollouts.
  double gen_loss_train = 0.0;
  double gen_loss_eval = 0.0;
  double aer_probe = 0.0;
  // Stage 2 only; not part of the CSV.
  double discriminator_loss = 0.0;
};

struct TrainingLog {
  std::vector<EpochRecord> records;

  std::vector<EpochRecord> ForStage(Stage stage) const;

  // Header: epoch,stage,policy_loss,gen_loss_train,gen_loss_eval,aer_probe
  // NaN values are written as empty fields.
  std::string ToCsv() const;
  static TrainingLog FromCsv(std::string_view text);

  void Write(const std::filesystem::path& path) const;
  static TrainingLog Read(const std::filesystem::path& path);
};

// Pearson correlation of two equally long series; NaN when undefined.
double Pearson(const std::vector<double>& x, const std::vector<double>& y);

}  // namespace ilfo::training

#endif  // ILFO_TRAINING_LOG_H_
