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

#include "ilfo/eval/report.h"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>

#include "ilfo/errors.h"
#include "ilfo/random.h"
#include "json.hpp"

namespace ilfo::eval {

using Json = nlohmann::ordered_json;

std::string SeedDigest(std::span<const std::uint64_t> seeds) {
  std::uint64_t h = Fnv1a("");
  for (std::uint64_t s : seeds) {
    unsigned char bytes[8];
    for (int i = 0; i < 8; ++i) bytes[i] = static_cast<unsigned char>(s >> (8 * i));
    h = Fnv1aBytes(bytes, sizeof bytes, h);
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

EvalReport Evaluate(std::string_view name, const PolicyFactory& policy,
                    const env::EnvSpec& spec, std::span<const std::uint64_t> seeds) {
  const AerStats agent = Aer(policy, spec, seeds);
  const AerStats teacher = Aer(env::TeacherPolicy(spec), spec, seeds);
  const AerStats random = Aer(RandomPolicyFactory(spec), spec, seeds);
  EvalReport r;
  r.policy = std::string(name);
  r.env = spec.name;
  r.aer_mean = agent.mean;
  r.aer_std = agent.std;
  r.cv = agent.mean == 0.0 ? std::numeric_limits<double>::quiet_NaN()
                           : CoefficientOfVariation(agent.mean, agent.std);
  r.performance = Performance(agent.mean, random.mean, teacher.mean);
  r.aer_teacher = teacher.mean;
  r.aer_random = random.mean;
  r.n_seeds = seeds.size();
  r.first_seed = seeds.front();
  r.last_seed = seeds.back();
  r.seed_digest = SeedDigest(seeds);
  return r;
}

StateSet OnlineInitialStates(const training::ExperimentConfig& config,
                             const env::EnvSpec& spec) {
  StateSet out;
  for (std::uint64_t s : training::OnlinePlaySeeds(config)) out.Add(env::Reset(spec, s).vector);
  return out;
}

std::vector<std::uint64_t> EvalSeedsFor(const training::ExperimentConfig& config,
                                        const data::Dataset& dataset, std::size_t n) {
  const env::EnvSpec spec = training::SpecFor(config);
  return DisjointEvalSeeds(spec, dataset, OnlineInitialStates(config, spec), n,
                           config.eval_seed_base);
}

namespace {

Json Number(double v) { return std::isfinite(v) ? Json(v) : Json(nullptr); }

double NumberOf(const Json& j, const char* key) {
  const Json& v = j.at(key);
  return v.is_null() ? std::numeric_limits<double>::quiet_NaN() : v.get<double>();
}

}  // namespace

std::string ReportToJson(const EvalReport& r) {
  Json j;
  j["policy"] = r.policy;
  j["env"] = r.env;
  j["aer_mean"] = Number(r.aer_mean);
  j["aer_std"] = Number(r.aer_std);
  j["cv"] = Number(r.cv);
  j["performance"] = Number(r.performance);
  j["aer_teacher"] = Number(r.aer_teacher);
  j["aer_random"] = Number(r.aer_random);
  j["n_seeds"] = r.n_seeds;
  j["first_seed"] = r.first_seed;
  j["last_seed"] = r.last_seed;
  j["seed_digest"] = r.seed_digest;
  return j.dump(2) + "\n";
}

EvalReport ReportFromJson(std::string_view text) {
  Json j;
  try {
    j = Json::parse(text);
  } catch (const Json::exception& e) {
    throw ParseError(std::string("eval report: ") + e.what());
  }
  try {
    EvalReport r;
    r.policy = j.at("policy").get<std::string>();
    r.env = j.at("env").get<std::string>();
    r.aer_mean = NumberOf(j, "aer_mean");
    r.aer_std = NumberOf(j, "aer_std");
    r.cv = NumberOf(j, "cv");
    r.performance = NumberOf(j, "performance");
    r.aer_teacher = NumberOf(j, "aer_teacher");
    r.aer_random = NumberOf(j, "aer_random");
    r.n_seeds = j.at("n_seeds").get<std::size_t>();
    r.first_seed = j.at("first_seed").get<std::uint64_t>();
    r.last_seed = j.at("last_seed").get<std::uint64_t>();
    r.seed_digest = j.at("seed_digest").get<std::string>();
    return r;
  } catch (const Json::exception& e) {
    throw ParseError(std::string("eval report: ") + e.what());
  }
}

void WriteReport(const EvalReport& report, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << ReportToJson(report);
}

std::string FormatRow(const EvalReport& r) {
  char buf[160];
  std::snprintf(buf, sizeof buf, "%-10s %12.4f ± %-10.4f P=%.4f  CV=%.2f%%  (n=%zu)",
                r.policy.c_str(), r.aer_mean, r.aer_std, r.performance, 100.0 * r.cv,
                r.n_seeds);
  return buf;
}

}  // namespace ilfo::eval
