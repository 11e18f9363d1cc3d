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

#include "ilfo/autodiff/checkpoint.h"

#include <bit>
#include <cstring>
#include <fstream>
#include <iterator>
#include <sstream>

#include "ilfo/errors.h"
#include "json.hpp"

namespace ilfo::ad {
namespace {

constexpr std::string_view kFormat = "ilfo-ckpt-1";

void AppendLittleEndian(std::string& out, double v) {
  std::uint64_t bits = std::bit_cast<std::uint64_t>(v);
  for (int i = 0; i < 8; ++i) {
    out.push_back(static_cast<char>((bits >> (8 * i)) & 0xffu));
  }
}

double ReadLittleEndian(const char* p) {
  std::uint64_t bits = 0;
  for (int i = 0; i < 8; ++i) {
    bits |= static_cast<std::uint64_t>(static_cast<unsigned char>(p[i])) << (8 * i);
  }
  return std::bit_cast<double>(bits);
}

}  // namespace

void Checkpoint::Put(const std::string& name, Tensor t) {
  if (arrays_.contains(name)) {
    throw ContractError("duplicate checkpoint entry '" + name + "'");
  }
  names_.push_back(name);
  arrays_.emplace(name, std::move(t));
}

bool Checkpoint::Contains(const std::string& name) const {
  return arrays_.contains(name);
}

const Tensor& Checkpoint::Get(const std::string& name) const {
  auto it = arrays_.find(name);
  if (it == arrays_.end()) {
    throw ParseError("checkpoint has no entry '" + name + "'");
  }
  return it->second;
}

std::string Checkpoint::Serialize() const {
  nlohmann::ordered_json entries = nlohmann::ordered_json::object();
  std::size_t offset = 0;
  for (const auto& n : names_) {
    const Tensor& t = arrays_.at(n);
    entries[n] = {{"shape", {t.rows(), t.cols()}}, {"offset", offset}};
    offset += t.size() * sizeof(double);
  }
  nlohmann::ordered_json header = {{"format", kFormat}, {"entries", entries}};
  std::string out = header.dump();
  out.push_back('\n');
  out.reserve(out.size() + offset);
  for (const auto& n : names_) {
    for (double v : arrays_.at(n).values()) AppendLittleEndian(out, v);
  }
  return out;
}

Checkpoint Checkpoint::Deserialize(std::string_view bytes) {
  const std::size_t newline = bytes.find('\n');
  if (newline == std::string_view::npos) {
    throw ParseError("checkpoint header is not newline-terminated", 1, 0);
  }
  nlohmann::ordered_json header;
  try {
    header = nlohmann::ordered_json::parse(bytes.substr(0, newline));
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError(std::string("checkpoint header: ") + e.what(), 1, e.byte);
  }
  if (!header.is_object() || header.value("format", "") != kFormat ||
      !header.contains("entries") || !header["entries"].is_object()) {
    throw ParseError("not an ilfo checkpoint", 1, 0);
  }
  const std::string_view data = bytes.substr(newline + 1);
  Checkpoint ckpt;
  std::size_t expected_offset = 0;
  for (const auto& [name, meta] : header["entries"].items()) {
    try {
      const std::size_t rows = meta.at("shape").at(0).get<std::size_t>();
      const std::size_t cols = meta.at("shape").at(1).get<std::size_t>();
      const std::size_t offset = meta.at("offset").get<std::size_t>();
      const std::size_t nbytes = rows * cols * sizeof(double);
      if (offset != expected_offset || offset + nbytes > data.size()) {
        throw ParseError("entry '" + name + "' has a bad offset", 1, newline + 1 + offset);
      }
      Tensor t({rows, cols});
      for (std::size_t i = 0; i < t.size(); ++i) {
        t[i] = ReadLittleEndian(data.data() + offset + i * sizeof(double));
      }
      ckpt.Put(name, std::move(t));
      expected_offset += nbytes;
    } catch (const nlohmann::json::exception& e) {
      throw ParseError("entry '" + name + "': " + e.what(), 1, 0);
    }
  }
  if (expected_offset != data.size()) {
    throw ParseError("checkpoint has trailing bytes", 1, newline + 1 + expected_offset);
  }
  return ckpt;
}

void Checkpoint::Write(const std::filesystem::path& path) const {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  const std::string bytes = Serialize();
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw std::runtime_error("write failed for " + path.string());
}

Checkpoint Checkpoint::Read(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError("cannot open checkpoint " + path.string());
  std::string bytes((std::istreambuf_iterator<char>(in)),
                    std::istreambuf_iterator<char>());
  return Deserialize(bytes);
}

bool Checkpoint::operator==(const Checkpoint& other) const {
  if (names_ != other.names_) return false;
  for (const auto& n : names_) {
    if (!(arrays_.at(n) == other.arrays_.at(n))) return false;
  }
  return true;
}

void AppendParameters(Checkpoint& ckpt, const ParameterSet& params) {
  for (const auto& n : params.names()) ckpt.Put(n, params.Get(n));
}

void RestoreParameters(const Checkpoint& ckpt, ParameterSet& params) {
  for (const auto& n : params.names()) params.Set(n, ckpt.Get(n));
}

std::string AdamStepKey(const ParameterSet& params) {
  return params.name().empty() ? "adam.t" : "adam.t." + params.name();
}

void AppendAdam(Checkpoint& ckpt, const ParameterSet& params,
                const AdamState& state) {
  for (const auto& n : params.names()) {
    auto m = state.m.find(n);
    auto v = state.v.find(n);
    const Shape shape = params.Get(n).shape();
    ckpt.Put("adam.m." + n, m != state.m.end() ? m->second : Tensor(shape));
    ckpt.Put("adam.v." + n, v != state.v.end() ? v->second : Tensor(shape));
  }
  ckpt.Put(AdamStepKey(params), Tensor::Scalar(static_cast<double>(state.t)));
}

void RestoreAdam(const Checkpoint& ckpt, const ParameterSet& params,
                 AdamState& state) {
  state.m.clear();
  state.v.clear();
  for (const auto& n : params.names()) {
    state.m[n] = ckpt.Get("adam.m." + n);
    state.v[n] = ckpt.Get("adam.v." + n);
  }
  state.t = static_cast<std::int64_t>(ckpt.Get(AdamStepKey(params)).item());
}

}  // namespace ilfo::ad
