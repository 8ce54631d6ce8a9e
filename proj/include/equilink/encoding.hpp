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

#include <array>
#include <compare>
#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "equilink/paillier.hpp"
#include "equilink/random.hpp"

namespace equilink {

inline constexpr unsigned kDefaultWidth = 32;
inline constexpr unsigned kMaxWidth = 64;

/// 2^width - 1, the largest value representable in `width` bits.
std::uint64_t max_value(unsigned width);

/// A non-negative integer pinned to a fixed bit width.
struct EncodedValue {
  std::uint64_t value = 0;
  unsigned width = kDefaultWidth;

  /// Throws Errc::domain if width is outside [1, 64] or value >= 2^width.
  static EncodedValue make(std::uint64_t value, unsigned width);

  friend bool operator==(const EncodedValue&, const EncodedValue&) = default;
};

/// A bit string read from the most significant end. `bits` holds the symbols
/// as a binary number, so "011" is {bits = 3, length = 3}.
struct PrefixString {
  std::uint64_t bits = 0;
  unsigned length = 0;

  static PrefixString parse(std::string_view symbols);
  std::string str() const;
  /// k-th symbol from the left, 0-based.
  unsigned symbol(unsigned k) const { return static_cast<unsigned>((bits >> (length - 1 - k)) & 1U); }

  friend auto operator<=>(const PrefixString&, const PrefixString&) = default;
};

/// Binary expansion, most significant bit first, zero padded to width.
std::vector<std::uint8_t> to_bits(EncodedValue v);

/// Prefixes ending at each 1-bit, listed from the most significant position
/// down. Empty for v = 0.
std::vector<PrefixString> one_encode(EncodedValue v);

/// For each 0-bit, the prefix above it followed by a 1. Listed from the most
/// significant position down. Empty for v = 2^w - 1.
std::vector<PrefixString> zero_encode(EncodedValue v);

/// Alice's w x 2 grid. Positions run 1..w with 1 the least significant bit;
/// the cell at (i, b_i) encrypts 0 and its sibling decrypts to a nonzero value.
class EncryptionTable {
 public:
  EncryptionTable() = default;
  /// columns[i - 1] = {cell(i, 0), cell(i, 1)}.
  EncryptionTable(unsigned width, std::vector<std::array<Ciphertext, 2>> columns);

  unsigned width() const noexcept { return width_; }
  const Ciphertext& cell(unsigned position, unsigned bit) const;

  friend bool operator==(const EncryptionTable&, const EncryptionTable&) = default;

 private:
  unsigned width_ = 0;
  std::vector<std::array<Ciphertext, 2>> columns_;
};

/// Throws Errc::domain for x = 0: the empty 1-encoding can never match.
EncryptionTable build_table(const PublicKey& pk, EncodedValue x, RandomSource& rng);

/// Homomorphic sum of the cells named by `t`, starting at position w.
/// Decrypts to 0 exactly when t is a prefix of x, so for strings ending in 1
/// exactly when t is in one_encode(x). `combinations`, if given,
/// is incremented by the number of ciphertext multiplications performed.
Ciphertext select_product(const PublicKey& pk, const EncryptionTable& table, const PrefixString& t,
                          std::size_t* combinations = nullptr);

/// [{"pos": w, "c0": hex, "c1": hex}, ..., {"pos": 1, ...}]
nlohmann::json table_to_json(const EncryptionTable& table);
/// Throws Errc::framing on shape errors and Errc::domain if a cell is not a
/// valid ciphertext under `pk`.
EncryptionTable table_from_json(const nlohmann::json& j, const PublicKey& pk);

}  // namespace equilink
