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

#include "ilfo/training/log.h"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iterator>
#include <limits>
#include <sstream>

#include "ilfo/errors.h"

namespace ilfo::training {
namespace {

constexpr std::string_view kHeader =
    "epoch,stage,policy_loss,gen_loss_train,gen_loss_eval,aer_probe";

std::string Format(double v) {
  if (std::isnan(v)) return "";
  char buf[32];
  auto [end, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, end);
}

double ParseDouble(std::string_view field, std::size_t line) {
  if (field.empty()) return std::numeric_limits<double>::quiet_NaN();
  double v = 0.0;
  auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), v);
  if (ec != std::errc() || ptr != field.data() + field.size()) {
    throw ParseError("bad number '" + std::string(field) + "'", line, 0);
  }
  return v;
}

std::vector<std::string_view> Split(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t pos = 0;
  for (;;) {
    const std::size_t comma = line.find(',', pos);
    out.push_back(line.substr(pos, comma == std::string_view::npos ? line.size() - pos
                                                                    : comma - pos));
    if (comma == std::string_view::npos) break;
    pos = comma + 1;
  }
  return out;
}

}  // namespace

std::string_view StageName(Stage stage) {
  return stage == Stage::kReconstruction ? "reconstruction" : "adversarial";
}

std::vector<EpochRecord> TrainingLog::ForStage(Stage stage) const {
  std::vector<EpochRecord> out;
  for (const auto& r : records)
    if (r.stage == stage) out.push_back(r);
  return out;
}

std::string TrainingLog::ToCsv() const {
  std::string out(kHeader);
  out.push_back('\n');
  for (const auto& r : records) {
    out += std::to_string(r.epoch) + "," + std::string(StageName(r.stage)) + "," +
           Format(r.policy_loss) + "," + Format(r.gen_loss_train) + "," +
           Format(r.gen_loss_eval) + "," + Format(r.aer_probe) + "\n";
  }
  return out;
}

TrainingLog TrainingLog::FromCsv(std::string_view text) {
  TrainingLog log;
  std::size_t pos = 0;
  std::size_t line_no = 0;
  while (pos < text.size()) {
    std::size_t end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    std::string_view line = text.substr(pos, end - pos);
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    pos = end + 1;
    ++line_no;
    if (line_no == 1) {
      if (line != kHeader) throw ParseError("unexpected training log header", 1, 0);
      continue;
    }
    if (line.empty()) continue;
    const auto f = Split(line);
    if (f.size() != 6) throw ParseError("expected 6 fields", line_no, 0);
    EpochRecord r;
    r.epoch = static_cast<int>(ParseDouble(f[0], line_no));
    if (f[1] == "reconstruction") {
      r.stage = Stage::kReconstruction;
    } else if (f[1] == "adversarial") {
      r.stage = Stage::kAdversarial;
    } else {
      throw ParseError("unknown stage '" + std::string(f[1]) + "'", line_no, 0);
    }
    r.policy_loss = ParseDouble(f[2], line_no);
    r.gen_loss_train = ParseDouble(f[3], line_no);
    r.gen_loss_eval = ParseDouble(f[4], line_no);
    r.aer_probe = ParseDouble(f[5], line_no);
    r.discriminator_loss = std::numeric_limits<double>::quiet_NaN();
    if (!log.records.empty() && r.epoch <= log.records.back().epoch) {
      throw ParseError("epoch indices must increase", line_no, 0);
    }
    log.records.push_back(r);
  }
  if (line_no == 0) throw ParseError("empty training log");
  return log;
}

void TrainingLog::Write(const std::filesystem::path& path) const {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << ToCsv();
}

TrainingLog TrainingLog::Read(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError("cannot open training log " + path.string());
  std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return FromCsv(text);
}

double Pearson(const std::vector<double>& x, const std::vector<double>& y) {
  const std::size_t n = x.size();
  if (n != y.size() || n < 2) return std::numeric_limits<double>::quiet_NaN();
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= static_cast<double>(n);
  my /= static_cast<double>(n);
  double sxy = 0.0, sxx = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    sxy += (x[i] - mx) * (y[i] - my);
    sxx += (x[i] - mx) * (x[i] - mx);
    syy += (y[i] - my) * (y[i] - my);
  }
  if (sxx == 0.0 || syy == 0.0) return std::numeric_limits<double>::quiet_NaN();
  return sxy / std::sqrt(sxx * syy);
}

}  // namespace ilfo::training
