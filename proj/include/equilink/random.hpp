// Copyright 2026 The Equilink Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <cstdint>
#include <random>
#include <span>
#include <utility>
#include <vector>

#include "equilink/bigint.hpp"

namespace equilink {

/// Byte source for key generation, encryption randomizers, padding and
/// permutations. Implementations decide their own thread-safety.
class RandomSource {
 public:
  virtual ~RandomSource() = default;
  virtual void fill(std::span<std::uint8_t> out) = 0;

  std::uint64_t next_u64();
  /// Uniform in [0, bound). bound must be > 0.
  std::uint64_t below(std::uint64_t bound);
  /// Uniform in [0, bound). bound must be > 0.
  BigInt below(const BigInt& bound);
  /// Uniform integer with exactly `nbits` random bits (top bit may be 0).
  BigInt bits(std::size_t nbits);
  bool coin() { return (next_u64() & 1U) != 0; }
};

/// OpenSSL's CSPRNG. Safe to share between threads.
class SystemRandom final : public RandomSource {
 public:
  void fill(std::span<std::uint8_t> out) override;
};

/// Seeded mt19937_64 stream. Reproducible across runs and platforms; used by
/// tests, golden fixtures and the synthetic data generator. Not thread-safe
/// and not suitable for production keys.
class DeterministicRandom final : public RandomSource {
 public:
  explicit DeterministicRandom(std::uint64_t seed) : engine_(seed) {}
  void fill(std::span<std::uint8_t> out) override;

 private:
  std::mt19937_64 engine_;
};

/// Process-wide CSPRNG instance.
RandomSource& system_random();

/// Fisher-Yates with `rng.below`, so the permutation depends only on the
/// byte stream and not on the standard library's shuffle.
template <typename T>
void shuffle(std::vector<T>& items, RandomSource& rng) {
  for (std::size_t i = items.size(); i > 1; --i) {
    const auto j = static_cast<std::size_t>(rng.below(static_cast<std::uint64_t>(i)));
    using std::swap;
    swap(items[i - 1], items[j]);
  }
}

}  // namespace equilink
