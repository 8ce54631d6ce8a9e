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

#include "equilink/random.hpp"

#include <openssl/rand.h>

#include <cassert>
#include <climits>
#include <vector>

#include "equilink/error.hpp"

namespace equilink {

std::string to_hex(const BigInt& v) { return v.get_str(16); }

std::optional<BigInt> from_hex(std::string_view hex) {
  if (hex.empty()) return std::nullopt;
  for (char c : hex) {
    const bool digit = c >= '0' && c <= '9';
    const bool lower = c >= 'a' && c <= 'f';
    if (!digit && !lower) return std::nullopt;
  }
  BigInt out;
  if (out.set_str(std::string(hex), 16) != 0) return std::nullopt;
  return out;
}

std::size_t bit_length(const BigInt& v) {
  if (v == 0) return 0;
  return mpz_sizeinbase(v.get_mpz_t(), 2);
}

std::uint64_t RandomSource::next_u64() {
  std::uint8_t buf[8];
  fill(buf);
  std::uint64_t v = 0;
  for (std::uint8_t b : buf) v = (v << 8) | b;
  return v;
}

std::uint64_t RandomSource::below(std::uint64_t bound) {
  assert(bound > 0);
  // Reject the short tail so every residue is equally likely.
  const std::uint64_t limit = UINT64_MAX - (UINT64_MAX % bound);
  for (;;) {
    const std::uint64_t v = next_u64();
    if (v < limit) return v % bound;
  }
}

BigInt RandomSource::bits(std::size_t nbits) {
  if (nbits == 0) return 0;
  std::vector<std::uint8_t> buf((nbits + 7) / 8);
  fill(buf);
  const std::size_t excess = buf.size() * 8 - nbits;
  buf[0] &= static_cast<std::uint8_t>(0xFFU >> excess);
  BigInt out;
  mpz_import(out.get_mpz_t(), buf.size(), 1, 1, 1, 0, buf.data());
  return out;
}

BigInt RandomSource::below(const BigInt& bound) {
  if (bound <= 0) raise(Errc::domain, "random bound must be positive");
  const BigInt top = bound - 1;
  const std::size_t nbits = bit_length(top);
  for (;;) {
    BigInt v = bits(nbits);
    if (v < bound) return v;
  }
}

void SystemRandom::fill(std::span<std::uint8_t> out) {
  if (out.empty()) return;
  if (RAND_bytes(out.data(), static_cast<int>(out.size())) != 1) {
    raise(Errc::config, "OpenSSL RAND_bytes failed");
  }
}

void DeterministicRandom::fill(std::span<std::uint8_t> out) {
  std::size_t i = 0;
  while (i < out.size()) {
    std::uint64_t v = engine_();
    for (int k = 0; k < 8 && i < out.size(); ++k, ++i) {
      out[i] = static_cast<std::uint8_t>(v >> 56);
      v <<= 8;
    }
  }
}

RandomSource& system_random() {
  static SystemRandom instance;
  return instance;
}

}  // namespace equilink
