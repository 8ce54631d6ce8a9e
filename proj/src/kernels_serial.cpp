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

#include "equilink/error.hpp"
#include "equilink/kernels.hpp"
#include "kernel_math.hpp"

namespace equilink::kernels {

void check_jobs(const PublicKey& pk, std::span<const EncryptJob> jobs) {
  for (const auto& job : jobs) {
    if (job.plaintext < 0 || job.plaintext >= pk.modulus()) raise(Errc::domain, "plaintext outside [0, n)");
    BigInt g;
    mpz_gcd(g.get_mpz_t(), job.randomizer.get_mpz_t(), pk.modulus().get_mpz_t());
    if (job.randomizer < 1 || job.randomizer >= pk.modulus() || g != 1) {
      raise(Errc::domain, "randomizer must be a unit mod n");
    }
  }
}

void check_prefixes(const EncryptionTable& table, std::span<const PrefixString> prefixes) {
  for (const auto& t : prefixes) {
    if (t.length == 0) raise(Errc::domain, "empty prefix");
    if (t.length > table.width()) raise(Errc::domain, "prefix longer than the table");
  }
}

namespace serial {

std::vector<Ciphertext> encrypt(const PublicKey& pk, std::span<const EncryptJob> jobs) {
  check_jobs(pk, jobs);
  std::vector<Ciphertext> out(jobs.size());
  for (std::size_t i = 0; i < jobs.size(); ++i) {
    detail::encrypt_one(pk, jobs[i].plaintext, jobs[i].randomizer, out[i].value);
  }
  return out;
}

std::vector<BigInt> decrypt(const PublicKey& pk, const PrivateKey& sk, std::span<const Ciphertext> batch) {
  for (const auto& c : batch) pk.check(c);
  std::vector<BigInt> out(batch.size());
  for (std::size_t i = 0; i < batch.size(); ++i) detail::decrypt_one(pk, sk, batch[i].value, out[i]);
  return out;
}

std::vector<Ciphertext> prefix_products(const PublicKey& pk, const EncryptionTable& table,
                                        std::span<const PrefixString> prefixes, std::size_t& combinations) {
  check_prefixes(table, prefixes);
  std::vector<Ciphertext> out(prefixes.size());
  for (std::size_t i = 0; i < prefixes.size(); ++i) {
    detail::product_one(pk, table, prefixes[i], out[i].value);
    combinations += prefixes[i].length - 1;
  }
  return out;
}

}  // namespace serial
}  // namespace equilink::kernels
