/*
 * Copyright 2026 the ppminspect authors.
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */
#pragma once

#include <cstdint>
#include <random>
#include <string_view>
#include <vector>

#include "util.hpp"

namespace ppmi {

// All randomness in the toolkit flows from one global seed through named
// sub-streams, e.g. Rng(seed, "split") or Rng(seed, "explain", row_hash).
// The engine is std::mt19937_64 (its sequence is pinned by the standard);
// the derived values below avoid std distributions, whose output is
// implementation defined.
class Rng {
 public:
  Rng(std::uint64_t seed, std::string_view stream, std::uint64_t a = 0,
      std::uint64_t b = 0)
      : engine_(mix(seed ^ fnv1a64(stream), a, b)) {}

  std::uint64_t next_u64() { return engine_(); }

  // Uniform in [0, 1).
  double uniform01() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
  }

  double uniform(double lo, double hi) {
    return lo + (hi - lo) * uniform01();
  }

  // Uniform integer in [0, n), n >= 1. Multiply-shift map; the tiny bias is
  // irrelevant here, determinism is not.
  std::uint64_t uniform_index(std::uint64_t n) {
    return static_cast<std::uint64_t>(
        (static_cast<unsigned __int128>(next_u64()) * n) >> 64);
  }

  bool bernoulli(double p) { return uniform01() < p; }

  template <typename T>
  void shuffle(std::vector<T>* values) {
    for (std::size_t i = values->size(); i > 1; --i) {
      std::size_t j = static_cast<std::size_t>(uniform_index(i));
      std::swap((*values)[i - 1], (*values)[j]);
    }
  }

  // Index drawn from an unnormalised weight vector.
  std::size_t categorical(const std::vector<double>& weights) {
    double total = 0.0;
    for (double w : weights) total += w;
    double u = uniform01() * total;
    double acc = 0.0;
    for (std::size_t i = 0; i < weights.size(); ++i) {
      acc += weights[i];
      if (u < acc) return i;
    }
    return weights.empty() ? 0 : weights.size() - 1;
  }

 private:
  static std::uint64_t mix(std::uint64_t x, std::uint64_t a, std::uint64_t b) {
    // splitmix64 chain over the three inputs.
    std::uint64_t z = x;
    for (std::uint64_t extra : {a, b}) {
      z += 0x9e3779b97f4a7c15ULL + extra;
      z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
      z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
      z = z ^ (z >> 31);
    }
    return z;
  }

  std::mt19937_64 engine_;
};

}  // namespace ppmi
