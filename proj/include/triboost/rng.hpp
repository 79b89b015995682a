/*
 * Copyright 2026 The Triboost Authors.
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#ifndef TRIBOOST_RNG_HPP_
#define TRIBOOST_RNG_HPP_

#include <cstddef>
#include <cstdint>
#include <random>
#include <string_view>
#include <utility>
#include <vector>

namespace triboost {

// Deterministic random source. The engine is std::mt19937_64, whose output
// stream is pinned by the C++ standard; every distribution below is
// hand-rolled because std:: distribution objects are implementation defined
// and would break cross-platform reproducibility.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next_u64() { return engine_(); }

  // Uniform double in [0, 1) with 53 random bits: (u >> 11) * 2^-53.
  double uniform();

  // Uniform double in [lo, hi).
  double uniform(double lo, double hi);

  // Uniform integer in [0, n) by rejection sampling; n must be > 0.
  std::uint64_t uniform_below(std::uint64_t n);

  // Standard normal via Box-Muller; generates pairs, caches the second.
  double normal();
  double normal(double mean, double stddev);

  // In-place Fisher-Yates shuffle (descending position, swap with
  // uniform_below(i)).
  template <typename T>
  void shuffle(std::vector<T>& items) {
    for (std::size_t i = items.size(); i > 1; --i) {
      const std::size_t j = static_cast<std::size_t>(uniform_below(i));
      std::swap(items[i - 1], items[j]);
    }
  }

  // k distinct indices drawn from [0, n), returned in draw order.
  std::vector<std::size_t> sample_without_replacement(std::size_t n,
                                                      std::size_t k);

 private:
  std::mt19937_64 engine_;
  bool has_cached_normal_ = false;
  double cached_normal_ = 0.0;
};

// Derives a stage-specific seed from a run seed and a short tag, so that
// adding draws to one pipeline stage never perturbs another. FNV-1a over the
// tag bytes, mixed with the base seed through splitmix64.
std::uint64_t derive_seed(std::uint64_t base, std::string_view tag);

// FNV-1a 64-bit hash over raw bytes; also used for output manifests.
std::uint64_t fnv1a64(const void* data, std::size_t size,
                      std::uint64_t basis = 0xcbf29ce484222325ULL);

}  // namespace triboost

#endif  // TRIBOOST_RNG_HPP_
