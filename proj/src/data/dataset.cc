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

#include "ilfo/data/dataset.h"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iterator>

#include "ilfo/errors.h"
#include "json.hpp"

namespace ilfo::data {
namespace {

using nlohmann::json;

constexpr std::string_view kScriptedTeacher = "scripted";

Dataset Generate(const env::EnvSpec& spec, std::size_t n,
                 std::uint64_t seed_base, bool labelled) {
  Dataset ds;
  ds.env_name = spec.name;
  ds.teacher = std::string(kScriptedTeacher);
  ds.trajectories.reserve(n);
  const env::Policy teacher = env::TeacherPolicy(spec);
  for (std::size_t i = 0; i < n; ++i) {
    ds.trajectories.push_back(env::Rollout(spec, teacher, seed_base + i, labelled));
  }
  return ds;
}

std::vector<std::vector<double>> ParseMatrix(const json& j, const char* key,
                                             std::size_t line, std::size_t offset) {
  if (!j.is_array()) {
    throw ParseError(std::string("'") + key + "' is not an array", line, offset);
  }
  std::vector<std::vector<double>> out;
  out.reserve(j.size());
  for (const auto& row : j) {
    if (!row.is_array()) {
      throw ParseError(std::string("'") + key + "' row is not an array", line, offset);
    }
    std::vector<double> r;
    r.reserve(row.size());
    for (const auto& x : row) {
      if (!x.is_number()) {
        throw ParseError(std::string("non-numeric entry in '") + key + "'", line, offset);
      }
      r.push_back(x.get<double>());
    }
    out.push_back(std::move(r));
  }
  return out;
}

}  // namespace

std::pair<std::uint64_t, std::uint64_t> Dataset::SeedRange() const {
  if (trajectories.empty()) return {0, 0};
  auto [lo, hi] = std::minmax_element(
      trajectories.begin(), trajectories.end(),
      [](const Trajectory& a, const Trajectory& b) { return a.seed < b.seed; });
  return {lo->seed, hi->seed};
}

Dataset GenerateTeacherDataset(const env::EnvSpec& spec, std::size_t n,
                               std::uint64_t seed_base) {
  if (n == 0) throw ContractError("teacher dataset needs n >= 1");
  return Generate(spec, n, seed_base, false);
}

Dataset GenerateLabelledTeacherDataset(const env::EnvSpec& spec, std::size_t n,
                                       std::uint64_t seed_base) {
  if (n == 0) throw ContractError("teacher dataset needs n >= 1");
  return Generate(spec, n, seed_base, true);
}

TransitionPairs ExtractTransitionPairs(const Dataset& dataset) {
  TransitionPairs out;
  for (const auto& traj : dataset.trajectories) {
    if (traj.states.size() < 2) {
      ++out.skipped;
      continue;
    }
    for (std::size_t i = 0; i + 1 < traj.states.size(); ++i) {
      out.pairs.push_back({traj.states[i], traj.states[i + 1]});
    }
  }
  return out;
}

DeltaSequence TeacherDeltaSequence(const Trajectory& trajectory) {
  if (trajectory.states.size() < 2) {
    throw ContractError("delta sequence needs at least two states");
  }
  DeltaSequence seq;
  seq.source = DeltaSource::kTeacher;
  seq.deltas.reserve(trajectory.states.size() - 1);
  for (std::size_t i = 0; i + 1 < trajectory.states.size(); ++i) {
    const auto& a = trajectory.states[i];
    const auto& b = trajectory.states[i + 1];
    std::vector<double> d(a.size());
    for (std::size_t k = 0; k < a.size(); ++k) d[k] = std::fabs(a[k] - b[k]);
    seq.deltas.push_back(std::move(d));
  }
  return seq;
}

std::string SerializeDataset(const Dataset& dataset) {
  std::string out;
  for (const auto& traj : dataset.trajectories) {
    nlohmann::ordered_json j;
    j["env"] = dataset.env_name;
    j["teacher"] = dataset.teacher;
    j["seed"] = traj.seed;
    j["states"] = traj.states;
    if (traj.actions) j["actions"] = *traj.actions;
    if (traj.rewards) j["rewards"] = *traj.rewards;
    out += j.dump();
    out.push_back('\n');
  }
  return out;
}

Dataset ParseDataset(std::string_view text) {
  Dataset ds;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  std::size_t state_dim = 0;
  bool have_dim = false;
  while (pos < text.size()) {
    const std::size_t end = std::min(text.find('\n', pos), text.size());
    const std::string_view line = text.substr(pos, end - pos);
    const std::size_t offset = pos;
    ++line_no;
    pos = end + 1;
    if (line.find_first_not_of(" \t\r") == std::string_view::npos) continue;

    json j;
    try {
      j = json::parse(line);
    } catch (const json::parse_error& e) {
      throw ParseError(std::string("malformed JSON: ") + e.what(), line_no,
                       offset + (e.byte > 0 ? e.byte - 1 : 0));
    }
    if (!j.is_object() || !j.contains("states") || !j.contains("seed") ||
        !j.contains("env")) {
      throw ParseError("record needs 'env', 'seed' and 'states'", line_no, offset);
    }
    Trajectory traj;
    try {
      const std::string env_name = j.at("env").get<std::string>();
      const std::string teacher = j.value("teacher", std::string());
      if (ds.trajectories.empty()) {
        ds.env_name = env_name;
        ds.teacher = teacher;
        try {
          state_dim = env::MakeSpec(env_name).state_dim;
          have_dim = true;
        } catch (const UnknownEnvError&) {
          have_dim = false;
        }
      } else if (env_name != ds.env_name || teacher != ds.teacher) {
        throw ParseError("mixed env/teacher ids in one dataset", line_no, offset);
      }
      traj.seed = j.at("seed").get<std::uint64_t>();
    } catch (const json::exception& e) {
      throw ParseError(std::string("bad field: ") + e.what(), line_no, offset);
    }
    traj.states = ParseMatrix(j["states"], "states", line_no, offset);
    for (const auto& s : traj.states) {
      if (!have_dim) {
        state_dim = s.size();
        have_dim = true;
      }
      if (s.size() != state_dim) {
        throw ParseError("state dimension " + std::to_string(s.size()) +
                             " does not match " + std::to_string(state_dim),
                         line_no, offset);
      }
    }
    const std::size_t steps = traj.length();
    if (j.contains("actions")) {
      traj.actions = ParseMatrix(j["actions"], "actions", line_no, offset);
      if (traj.actions->size() != steps) {
        throw ParseError("actions length does not match states", line_no, offset);
      }
    }
    if (j.contains("rewards")) {
      const auto& r = j["rewards"];
      if (!r.is_array() || r.size() != steps) {
        throw ParseError("rewards length does not match states", line_no, offset);
      }
      traj.rewards.emplace();
      for (const auto& x : r) {
        if (!x.is_number()) throw ParseError("non-numeric reward", line_no, offset);
        traj.rewards->push_back(x.get<double>());
      }
    }
    ds.trajectories.push_back(std::move(traj));
  }
  return ds;
}

void SaveDataset(const Dataset& dataset, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  const std::string text = SerializeDataset(dataset);
  out.write(text.data(), static_cast<std::streamsize>(text.size()));
  if (!out) throw std::runtime_error("write failed for " + path.string());
}

Dataset LoadDataset(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError("cannot open dataset " + path.string());
  std::string text((std::istreambuf_iterator<char>(in)),
                   std::istreambuf_iterator<char>());
  return ParseDataset(text);
}

}  // namespace ilfo::data
