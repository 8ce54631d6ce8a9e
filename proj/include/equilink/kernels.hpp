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

// Batch kernels for the three hot loops of a comparison: filling Alice's
// table, Bob's prefix products and Alice's decryptions. `serial` is the
// reference; `parallel` splits the batch with OpenMP and must produce
// bit-identical output. All randomness is drawn by the caller beforehand.

#include <cstddef>
#include <span>
#include <vector>

#include "equilink/encoding.hpp"
#include "equilink/paillier.hpp"

namespace equilink::kernels {

struct EncryptJob {
  BigInt plaintext;
  BigInt randomizer;
};

namespace serial {

std::vector<Ciphertext> encrypt(const PublicKey& pk, std::span<const EncryptJob> jobs);
std::vector<BigInt> decrypt(const PublicKey& pk, const PrivateKey& sk, std::span<const Ciphertext> batch);
/// `combinations` is incremented by the number of multiplications performed.
std::vector<Ciphertext> prefix_products(const PublicKey& pk, const EncryptionTable& table,
                                        std::span<const PrefixString> prefixes, std::size_t& combinations);

}  // namespace serial

namespace parallel {

std::vector<Ciphertext> encrypt(const PublicKey& pk, std::span<const EncryptJob> jobs);
std::vector<BigInt> decrypt(const PublicKey& pk, const PrivateKey& sk, std::span<const Ciphertext> batch);
std::vector<Ciphertext> prefix_products(const PublicKey& pk, const EncryptionTable& table,
                                        std::span<const PrefixString> prefixes, std::size_t& combinations);

int max_threads();

}  // namespace parallel

// Shared argument checks, run before any parallel region so nothing throws
// from inside one.
void check_jobs(const PublicKey& pk, std::span<const EncryptJob> jobs);
void check_prefixes(const EncryptionTable& table, std::span<const PrefixString> prefixes);

}  // namespace equilink::kernels
