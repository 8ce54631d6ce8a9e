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

#include <omp.h>

#include "equilink/kernels.hpp"
#include "kernel_math.hpp"

namespace equilink::kernels::parallel {

int max_threads() { return omp_get_max_threads(); }

std::vector<Ciphertext> encrypt(const PublicKey& pk, std::span<const EncryptJob> jobs) {
  check_jobs(pk, jobs);
  std::vector<Ciphertext> out(jobs.size());
  const auto count = static_cast<std::ptrdiff_t>(jobs.size());
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t i = 0; i < count; ++i) {
    detail::encrypt_one(pk, jobs[i].plaintext, jobs[i].randomizer, out[i].value);
  }
  return out;
}

std::vector<BigInt> decrypt(const PublicKey& pk, const PrivateKey& sk, std::span<const Ciphertext> batch) {
  for (const auto& c : batch) pk.check(c);
  std::vector<BigInt> out(batch.size());
  const auto count = static_cast<std::ptrdiff_t>(batch.size());
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t i = 0; i < count; ++i) {
    detail::decrypt_one(pk, sk, batch[i].value, out[i]);
  }
  return out;
}

std::vector<Ciphertext> prefix_products(const PublicKey& pk, const EncryptionTable& table,
                                        std::span<const PrefixString> prefixes, std::size_t& combinations) {
  check_prefixes(table, prefixes);
  std::vector<Ciphertext> out(prefixes.size());
  const auto count = static_cast<std::ptrdiff_t>(prefixes.size());
  std::size_t performed = 0;
  // Prefix lengths differ, so let threads pick up work dynamically.
#pragma omp parallel for schedule(dynamic) reduction(+ : performed)
  for (std::ptrdiff_t i = 0; i < count; ++i) {
    detail::product_one(pk, table, prefixes[i], out[i].value);
    performed += prefixes[i].length - 1;
  }
  combinations += performed;
  return out;
}

}  // namespace equilink::kernels::parallel
