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

#ifndef ILFO_RANDOM_H_
#define ILFO_RANDOM_H_

#include <cstddef>
#include <cstdint>
#include <limits>
#include <string_view>
#include <utility>
#include <vector>

namespace ilfo {

// 64-bit FNV-1a. Used to turn stream names into stream ids and to hash
// parameter bytes.
constexpr std::uint64_t Fnv1a(std::string_view s,
                              std::uint64_t h = 0xcbf29ce484222325ull) {
  for (char c : s) {
    h ^= static_cast<unsigned char>(c);
    h *= 0x100000001b3ull;
  }
  return h;
}

std::uint64_t Fnv1aBytes(const void* data, std::size_t n,
                         std::uint64_t h = 0xcbf29ce484222325ull);

// SplitMix64 finalizer.
constexpr std::uint64_t Mix64(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
  return z ^ (z >> 31);
}

// Counter-based generator: the i-th draw is Mix64(key + (i+1) * golden),
// where key is derived from (seed, stream). Two streams never share state,
// and draw i of a stream can be recomputed without replaying 0..i-1.
//
// All derived distributions are implemented here (not via <random>
// distributions) so that streams are bitwise reproducible across standard
// libraries.
class CounterRng {
 public:
  using result_type = std::uint64_t;

  CounterRng(std::uint64_t seed, std::uint64_t stream)
      : key_(Mix64(Mix64(seed) ^ (stream + 0x632be59bd9b4e019ull))) {}
  CounterRng(std::uint64_t seed, std::string_view stream_name)
      : CounterRng(seed, Fnv1a(stream_name)) {}

  // Sub-stream for e.g. a given epoch or rollout index.
  CounterRng Fork(std::uint64_t index) const {
    CounterRng r = *this;
    r.key_ = Mix64(key_ ^ Mix64(index + 0x9e3779b97f4a7c15ull));
    r.counter_ = 0;
    return r;
  }

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() {
    return std::numeric_limits<result_type>::max();
  }

  result_type operator()() { return NextU64(); }

  std::uint64_t NextU64() {
    ++counter_;
    return Mix64(key_ + counter_ * 0x9e3779b97f4a7c15ull);
  }

  // [0, 1) with 53 random bits.
  double Uniform() { return static_cast<double>(NextU64() >> 11) * 0x1.0p-53; }
  double Uniform(double lo, double hi) { return lo + (hi - lo) * Uniform(); }

  // Standard normal via Box-Muller (one output per two uniforms).
  double Normal();

  // Uniform integer in [0, n). Rejection sampling, no modulo bias.
  std::size_t Below(std::size_t n);

  template <class T>
  void Shuffle(std::vector<T>& v) {
    for (std::size_t i = v.size(); i > 1; --i) {
      std::swap(v[i - 1], v[Below(i)]);
    }
  }

  std::uint64_t counter() const { return counter_; }

 private:
  std::uint64_t key_;
  std::uint64_t counter_ = 0;
};

}  // namespace ilfo

#endif  // ILFO_RANDOM_H_
