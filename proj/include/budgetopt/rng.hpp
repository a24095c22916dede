// Copyright 2026 The budgetopt Authors
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

#ifndef BUDGETOPT_RNG_HPP_
#define BUDGETOPT_RNG_HPP_

#include <cmath>
#include <cstdint>
#include <random>
#include <string_view>

namespace budgetopt {

// Seedable, portable random source. The engine is std::mt19937_64 (its output
// sequence is pinned by the standard) and all distributions are implemented
// by hand on top of raw 64-bit draws, so streams are reproducible across
// platforms and standard libraries.
//
// Stream splitting: rather than sharing one sequence, independent draws are
// taken from substreams keyed by (purpose, index). Per-segment substreams make
// generated scenarios independent of evaluation order.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next_u64() { return engine_(); }

  /// Uniform double in [0, 1) with 53 random bits.
  double uniform01() {
    return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
  }

  /// Uniform double in [lo, hi).
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

  /// Uniform integer in [lo, hi] via rejection-free modulo of a wide draw.
  std::int64_t uniform_int(std::int64_t lo, std::int64_t hi) {
    const std::uint64_t span = static_cast<std::uint64_t>(hi - lo) + 1;
    return lo + static_cast<std::int64_t>(engine_() % span);
  }

  /// Standard normal via Box-Muller on two uniform draws.
  double normal() {
    double u1 = uniform01();
    while (u1 <= 0.0) u1 = uniform01();
    const double u2 = uniform01();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586 * u2);
  }

  /// splitmix64 finalizer; used to derive substream seeds.
  static std::uint64_t mix(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
  }

  static std::uint64_t mix(std::uint64_t a, std::uint64_t b) {
    return mix(a ^ mix(b));
  }

  /// FNV-1a over a tag string, for readable stream labels.
  static std::uint64_t tag(std::string_view name) {
    std::uint64_t h = 1469598103934665603ULL;
    for (const char ch : name) {
      h ^= static_cast<unsigned char>(ch);
      h *= 1099511628211ULL;
    }
    return h;
  }

  /// Substream keyed by a label and an index, e.g. substream(seed, "b", i).
  static Rng substream(std::uint64_t seed, std::string_view label,
                       std::uint64_t index = 0) {
    return Rng(mix(mix(seed, tag(label)), index));
  }

 private:
  std::mt19937_64 engine_;
};

}  // namespace budgetopt

#endif  // BUDGETOPT_RNG_HPP_
