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

#ifndef ILFO_DATA_DATASET_H_
#define ILFO_DATA_DATASET_H_

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "ilfo/data/trajectory.h"
#include "ilfo/env/env.h"

namespace ilfo::data {

struct Dataset {
  std::string env_name;
  std::string teacher;  // producer id, e.g. "scripted"
  std::vector<Trajectory> trajectories;

  // Smallest and largest trajectory seed; {0, 0} when empty.
  std::pair<std::uint64_t, std::uint64_t> SeedRange() const;
  bool operator==(const Dataset&) const = default;
};

struct TransitionPair {
  std::vector<double> s;
  std::vector<double> s_next;
};

struct TransitionPairs {
  std::vector<TransitionPair> pairs;
  // Trajectories with fewer than two states.
  std::size_t skipped = 0;
};

enum class DeltaSource { kTeacher, kAgent };

// Elementwise |s_i - t_i| where t_i is the successor of s_i, observed (teacher)
// or generated (agent).
struct DeltaSequence {
  std::vector<std::vector<double>> deltas;
  DeltaSource source = DeltaSource::kTeacher;
};

// n state-only trajectories of the scripted teacher on seeds
// seed_base .. seed_base + n - 1.
Dataset GenerateTeacherDataset(const env::EnvSpec& spec, std::size_t n,
                               std::uint64_t seed_base);

// Same, with actions and rewards kept (behavioural-cloning reference only).
Dataset GenerateLabelledTeacherDataset(const env::EnvSpec& spec, std::size_t n,
                                       std::uint64_t seed_base);

// All consecutive (s, s') pairs, trajectory order then time order.
TransitionPairs ExtractTransitionPairs(const Dataset& dataset);

DeltaSequence TeacherDeltaSequence(const Trajectory& trajectory);

// JSON Lines, one trajectory per line:
//   {"env":..., "teacher":..., "seed":..., "states":[[...],...],
//    "actions":[[...],...], "rewards":[...]}
// with "actions"/"rewards" present only when recorded. Doubles are written
// in shortest round-trip form, so save/load is bitwise lossless.
std::string SerializeDataset(const Dataset& dataset);
Dataset ParseDataset(std::string_view text);

void SaveDataset(const Dataset& dataset, const std::filesystem::path& path);
Dataset LoadDataset(const std::filesystem::path& path);

}  // namespace ilfo::data

#endif  // ILFO_DATA_DATASET_H_
