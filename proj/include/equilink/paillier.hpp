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

#include <cstddef>
#include <filesystem>

#include <nlohmann/json.hpp>

#include "equilink/bigint.hpp"
#include "equilink/random.hpp"

namespace equilink {

/// An element of the unit group mod n^2.
struct Ciphertext {
  BigInt value;

  friend bool operator==(const Ciphertext& a, const Ciphertext& b) { return a.value == b.value; }
};

/// Paillier public key with the generator fixed to n + 1.
class PublicKey {
 public:
  PublicKey() = default;
  explicit PublicKey(BigInt modulus);

  const BigInt& modulus() const noexcept { return n_; }
  const BigInt& generator() const noexcept { return g_; }
  const BigInt& squared_modulus() const noexcept { return n2_; }
  std::size_t bits() const { return bit_length(n_); }

  /// In [1, n^2) and coprime to n.
  bool contains(const Ciphertext& c) const;
  /// Throws Errc::domain unless contains(c).
  void check(const Ciphertext& c) const;

  friend bool operator==(const PublicKey& a, const PublicKey& b) { return a.n_ == b.n_; }

 private:
  BigInt n_;
  BigInt g_;
  BigInt n2_;
};

struct PrivateKey {
  BigInt lambda;  // lcm(p-1, q-1)
  BigInt mu;      // L(g^lambda mod n^2)^-1 mod n
};

struct KeyPair {
  PublicKey pub;
  PrivateKey priv;

  /// Builds a key from known primes. Intended for tests with tiny moduli
  /// (e.g. 11 * 13) that keygen would refuse.
  static KeyPair from_primes(const BigInt& p, const BigInt& q);
};

inline constexpr std::size_t kMinKeyBits = 64;

/// Two distinct bits/2-bit primes; the modulus has exactly `bits` bits.
KeyPair keygen(std::size_t bits, RandomSource& rng = system_random());

/// Uniform element of the units mod n.
BigInt random_unit(const PublicKey& pk, RandomSource& rng);

/// g^m * r^n mod n^2 with a caller-supplied randomizer.
Ciphertext encrypt_with(const PublicKey& pk, const BigInt& m, const BigInt& r);
Ciphertext encrypt(const PublicKey& pk, const BigInt& m, RandomSource& rng = system_random());

BigInt decrypt(const PublicKey& pk, const PrivateKey& sk, const Ciphertext& c);

/// a * b mod n^2, i.e. an encryption of the plaintext sum mod n.
Ciphertext add_encrypted(const PublicKey& pk, const Ciphertext& a, const Ciphertext& b);

enum class RandomMode {
  uniform,            // any unit mod n^2; decrypts to 0 with probability 1/n
  nonzero_plaintext,  // never decrypts to 0
};

Ciphertext random_ciphertext(const PublicKey& pk, RandomSource& rng,
                             RandomMode mode = RandomMode::uniform);

// Key files: {"bits", "n", "g"} plus {"lambda", "mu"} for private keys.
nlohmann::json public_key_to_json(const PublicKey& pk);
nlohmann::json key_pair_to_json(const KeyPair& keys);
PublicKey public_key_from_json(const nlohmann::json& j);
KeyPair key_pair_from_json(const nlohmann::json& j);

void save_json(const std::filesystem::path& path, const nlohmann::json& j);
nlohmann::json load_json(const std::filesystem::path& path);

}  // namespace equilink
