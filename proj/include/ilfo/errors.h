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

#ifndef ILFO_ERRORS_H_
#define ILFO_ERRORS_H_

#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace ilfo {

// Operand shapes (or state/action dimensions) do not agree.
class DimensionError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// A caller broke an operation's precondition (e.g. backward from a
// non-scalar root).
class ContractError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

class IncompleteGradientError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

class UnknownEnvError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

class EmptyInputError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

class MissingLabelsError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Zero denominators in Performance / CV, or an undefined oracle input.
class DegenerateError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

class InsufficientSeedsError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Parameters that were frozen changed before the freeze was released.
class FrozenViolationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Malformed dataset / checkpoint / config file. `line` is 1-based and
// `offset` is the byte offset of the failing record (0 when unknown).
class ParseError : public std::runtime_error {
 public:
  ParseError(const std::string& what, std::size_t line, std::size_t offset)
      : std::runtime_error(what + " (line " + std::to_string(line) +
                           ", offset " + std::to_string(offset) + ")"),
        line_(line),
        offset_(offset) {}
  explicit ParseError(const std::string& what)
      : std::runtime_error(what), line_(0), offset_(0) {}

  std::size_t line() const { return line_; }
  std::size_t offset() const { return offset_; }

 private:
  std::size_t line_;
  std::size_t offset_;
};

// A loss became NaN/Inf during training.
class NumericError : public std::runtime_error {
 public:
  NumericError(const std::string& what, int epoch)
      : std::runtime_error(what + " at epoch " + std::to_string(epoch)),
        epoch_(epoch) {}
  int epoch() const { return epoch_; }

 private:
  int epoch_;
};

class ConfigError : public std::invalid_argument {
 public:
  explicit ConfigError(std::vector<std::string> violations)
      : std::invalid_argument(Join(violations)),
        violations_(std::move(violations)) {}
  const std::vector<std::string>& violations() const { return violations_; }

 private:
  static std::string Join(const std::vector<std::string>& v) {
    std::string out = "invalid config:";
    for (const auto& s : v) out += "\n  - " + s;
    return out;
  }
  std::vector<std::string> violations_;
};

}  // namespace ilfo

#endif  // ILFO_ERRORS_H_
