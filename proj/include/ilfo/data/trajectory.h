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

#ifndef ILFO_DATA_TRAJECTORY_H_
#define ILFO_DATA_TRAJECTORY_H_

#include <cstdint>
#include <optional>
#include <vector>

namespace ilfo::data {

// States s_0..s_T, with actions a_0..a_{T-1} and rewards r_0..r_{T-1} when
// they were recorded. Teacher datasets carry states only.
struct Trajectory {
  std::vector<std::vector<double>> states;
  std::optional<std::vector<std::vector<double>>> actions;
  std::optional<std::vector<double>> rewards;
  std::uint64_t seed = 0;

  std::size_t length() const { return states.empty() ? 0 : states.size() - 1; }
  bool operator==(const Trajectory&) const = default;
};

}  // namespace ilfo::data

#endif  // ILFO_DATA_TRAJECTORY_H_
