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

#ifndef ILFO_AUTODIFF_CHECKPOINT_H_
#define ILFO_AUTODIFF_CHECKPOINT_H_

#include <filesystem>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "ilfo/autodiff/optim.h"
#include "ilfo/autodiff/parameters.h"
#include "ilfo/autodiff/tensor.h"

namespace ilfo::ad {

// Ordered archive of named arrays.
//
// File layout: one line of compact JSON
//   {"format":"ilfo-ckpt-1","entries":{"<name>":{"shape":[r,c],"offset":o},...}}
// terminated by '\n', followed by the arrays as little-endian IEEE-754
// doubles in header order. `offset` is relative to the first data byte.
class Checkpoint {
 public:
  void Put(const std::string& name, Tensor t);
  bool Contains(const std::string& name) const;
  const Tensor& Get(const std::string& name) const;
  const std::vector<std::string>& names() const { return names_; }

  std::string Serialize() const;
  static Checkpoint Deserialize(std::string_view bytes);

  void Write(const std::filesystem::path& path) const;
  static Checkpoint Read(const std::filesystem::path& path);

  bool operator==(const Checkpoint& other) const;

 private:
  std::vector<std::string> names_;
  std::unordered_map<std::string, Tensor> arrays_;
};

// Parameter names are stored verbatim (networks already prefix theirs).
void AppendParameters(Checkpoint& ckpt, const ParameterSet& params);
void RestoreParameters(const Checkpoint& ckpt, ParameterSet& params);

// Moments go under "adam.m.<param>" / "adam.v.<param>", the step counter
// under "adam.t" (or "adam.t.<set name>" for named sets, so several
// optimizers can share one file).
void AppendAdam(Checkpoint& ckpt, const ParameterSet& params,
                const AdamState& state);
void RestoreAdam(const Checkpoint& ckpt, const ParameterSet& params,
                 AdamState& state);
std::string AdamStepKey(const ParameterSet& params);

}  // namespace ilfo::ad

#endif  // ILFO_AUTODIFF_CHECKPOINT_H_
