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

// Non-throwing per-element bodies shared by the serial and parallel kernels.
// Arguments are validated by the callers.

#include "equilink/encoding.hpp"
#include "equilink/paillier.hpp"

namespace equilink::kernels::detail {

inline void encrypt_one(const PublicKey& pk, const BigInt& m, const BigInt& r, BigInt& out) {
  const BigInt& n2 = pk.squared_modulus();
  BigInt rn;
  mpz_powm(rn.get_mpz_t(), r.get_mpz_t(), pk.modulus().get_mpz_t(), n2.get_mpz_t());
  out = 1 + m * pk.modulus();
  out *= rn;
  out %= n2;
}

inline void decrypt_one(const PublicKey& pk, const PrivateKey& sk, const BigInt& c, BigInt& out) {
  BigInt u;
  mpz_powm(u.get_mpz_t(), c.get_mpz_t(), sk.lambda.get_mpz_t(), pk.squared_modulus().get_mpz_t());
  u -= 1;
  u /= pk.modulus();
  out = u * sk.mu;
  out %= pk.modulus();
}

inline void product_one(const PublicKey& pk, const EncryptionTable& table, const PrefixString& t, BigInt& out) {
  const unsigned w = table.width();
  out = table.cell(w, t.symbol(0)).value;
  for (unsigned k = 1; k < t.length; ++k) {
    out *= table.cell(w - k, t.symbol(k)).value;
    out %= pk.squared_modulus();
  }
}

}  // namespace equilink::kernels::detail
