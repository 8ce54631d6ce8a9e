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

#include "equilink/paillier.hpp"

#include <fstream>
#include <string>

#include "equilink/error.hpp"

namespace equilink {
namespace {

BigInt L(const BigInt& u, const BigInt& n) { return (u - 1) / n; }

BigInt powm(const BigInt& base, const BigInt& exp, const BigInt& mod) {
  BigInt out;
  mpz_powm(out.get_mpz_t(), base.get_mpz_t(), exp.get_mpz_t(), mod.get_mpz_t());
  return out;
}

BigInt gcd(const BigInt& a, const BigInt& b) {
  BigInt out;
  mpz_gcd(out.get_mpz_t(), a.get_mpz_t(), b.get_mpz_t());
  return out;
}

bool is_probable_prime(const BigInt& v) { return mpz_probab_prime_p(v.get_mpz_t(), 40) > 0; }

BigInt random_prime(std::size_t bits, RandomSource& rng) {
  for (;;) {
    BigInt candidate = rng.bits(bits);
    // Top two bits set keeps the product at exactly 2*bits bits.
    mpz_setbit(candidate.get_mpz_t(), bits - 1);
    mpz_setbit(candidate.get_mpz_t(), bits - 2);
    mpz_setbit(candidate.get_mpz_t(), 0);
    BigInt p;
    mpz_nextprime(p.get_mpz_t(), candidate.get_mpz_t());
    if (bit_length(p) == bits) return p;
  }
}

const nlohmann::json& field(const nlohmann::json& j, const char* name) {
  if (!j.is_object() || !j.contains(name)) {
    raise(Errc::config, std::string("key file missing field '") + name + "'");
  }
  return j.at(name);
}

BigInt hex_field(const nlohmann::json& j, const char* name) {
  const auto& v = field(j, name);
  if (!v.is_string()) raise(Errc::config, std::string("key field '") + name + "' is not a string");
  auto parsed = from_hex(v.get<std::string>());
  if (!parsed) raise(Errc::config, std::string("key field '") + name + "' is not lowercase hex");
  return *parsed;
}

}  // namespace

PublicKey::PublicKey(BigInt modulus) : n_(std::move(modulus)) {
  if (n_ < 3) raise(Errc::config, "modulus too small");
  g_ = n_ + 1;
  n2_ = n_ * n_;
}

bool PublicKey::contains(const Ciphertext& c) const {
  if (c.value < 1 || c.value >= n2_) return false;
  return gcd(c.value, n_) == 1;
}

void PublicKey::check(const Ciphertext& c) const {
  if (!contains(c)) raise(Errc::domain, "ciphertext outside the unit group mod n^2");
}

KeyPair KeyPair::from_primes(const BigInt& p, const BigInt& q) {
  if (p == q) raise(Errc::config, "primes must be distinct");
  if (!is_probable_prime(p) || !is_probable_prime(q)) raise(Errc::config, "factors must be prime");
  const BigInt n = p * q;
  const BigInt phi = (p - 1) * (q - 1);
  if (gcd(n, phi) != 1) raise(Errc::config, "gcd(n, phi(n)) != 1");

  KeyPair keys{PublicKey(n), {}};
  const BigInt pm1 = p - 1;
  const BigInt qm1 = q - 1;
  mpz_lcm(keys.priv.lambda.get_mpz_t(), pm1.get_mpz_t(), qm1.get_mpz_t());
  const BigInt u = L(powm(keys.pub.generator(), keys.priv.lambda, keys.pub.squared_modulus()), n);
  if (mpz_invert(keys.priv.mu.get_mpz_t(), u.get_mpz_t(), n.get_mpz_t()) == 0) {
    raise(Errc::config, "L(g^lambda) is not invertible mod n");
  }
  return keys;
}

KeyPair keygen(std::size_t bits, RandomSource& rng) {
  if (bits < kMinKeyBits) raise(Errc::config, "key size must be at least 64 bits");
  if (bits % 2 != 0) raise(Errc::config, "key size must be even");
  const std::size_t half = bits / 2;
  for (;;) {
    const BigInt p = random_prime(half, rng);
    const BigInt q = random_prime(half, rng);
    if (p == q) continue;
    if (gcd(p * q, (p - 1) * (q - 1)) != 1) continue;
    return KeyPair::from_primes(p, q);
  }
}

BigInt random_unit(const PublicKey& pk, RandomSource& rng) {
  for (;;) {
    BigInt r = rng.below(pk.modulus());
    if (r != 0 && gcd(r, pk.modulus()) == 1) return r;
  }
}

Ciphertext encrypt_with(const PublicKey& pk, const BigInt& m, const BigInt& r) {
  if (m < 0 || m >= pk.modulus()) raise(Errc::domain, "plaintext outside [0, n)");
  if (r < 1 || r >= pk.modulus() || gcd(r, pk.modulus()) != 1) {
    raise(Errc::domain, "randomizer must be a unit mod n");
  }
  const BigInt& n2 = pk.squared_modulus();
  // g = n + 1, so g^m = 1 + m*n (mod n^2).
  BigInt gm = (1 + m * pk.modulus()) % n2;
  BigInt c = gm * powm(r, pk.modulus(), n2);
  c %= n2;
  return Ciphertext{std::move(c)};
}

Ciphertext encrypt(const PublicKey& pk, const BigInt& m, RandomSource& rng) {
  return encrypt_with(pk, m, random_unit(pk, rng));
}

BigInt decrypt(const PublicKey& pk, const PrivateKey& sk, const Ciphertext& c) {
  pk.check(c);
  const BigInt u = powm(c.value, sk.lambda, pk.squared_modulus());
  BigInt m = L(u, pk.modulus()) * sk.mu;
  m %= pk.modulus();
  return m;
}

Ciphertext add_encrypted(const PublicKey& pk, const Ciphertext& a, const Ciphertext& b) {
  pk.check(a);
  pk.check(b);
  BigInt c = a.value * b.value;
  c %= pk.squared_modulus();
  return Ciphertext{std::move(c)};
}

Ciphertext random_ciphertext(const PublicKey& pk, RandomSource& rng, RandomMode mode) {
  if (mode == RandomMode::nonzero_plaintext) {
    // (m, r) -> g^m r^n is a bijection Z_n x Z_n^* -> Z_{n^2}^*, so drawing
    // m from [1, n) is the uniform distribution conditioned on D(c) != 0.
    BigInt m = rng.below(pk.modulus() - 1) + 1;
    return encrypt_with(pk, m, random_unit(pk, rng));
  }
  for (;;) {
    Ciphertext c{rng.below(pk.squared_modulus())};
    if (pk.contains(c)) return c;
  }
}

nlohmann::json public_key_to_json(const PublicKey& pk) {
  return {{"bits", pk.bits()}, {"n", to_hex(pk.modulus())}, {"g", to_hex(pk.generator())}};
}

nlohmann::json key_pair_to_json(const KeyPair& keys) {
  auto j = public_key_to_json(keys.pub);
  j["lambda"] = to_hex(keys.priv.lambda);
  j["mu"] = to_hex(keys.priv.mu);
  return j;
}

PublicKey public_key_from_json(const nlohmann::json& j) {
  PublicKey pk(hex_field(j, "n"));
  if (hex_field(j, "g") != pk.generator()) raise(Errc::config, "key generator must be n + 1");
  const auto& bits = field(j, "bits");
  if (!bits.is_number_unsigned() || bits.get<std::size_t>() != pk.bits()) {
    raise(Errc::config, "key 'bits' does not match the modulus");
  }
  return pk;
}

KeyPair key_pair_from_json(const nlohmann::json& j) {
  KeyPair keys{public_key_from_json(j), {hex_field(j, "lambda"), hex_field(j, "mu")}};
  // A wrong lambda/mu pairing shows up immediately as a failed round trip.
  const Ciphertext probe = encrypt_with(keys.pub, 1, 1);
  if (decrypt(keys.pub, keys.priv, probe) != 1) raise(Errc::config, "private key does not match modulus");
  return keys;
}

void save_json(const std::filesystem::path& path, const nlohmann::json& j) {
  std::ofstream out(path);
  if (!out) raise(Errc::config, "cannot open '" + path.string() + "' for writing");
  out << j.dump(2) << '\n';
  if (!out) raise(Errc::config, "write to '" + path.string() + "' failed");
}

nlohmann::json load_json(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) raise(Errc::config, "cannot open '" + path.string() + "'");
  try {
    return nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    raise(Errc::config, "'" + path.string() + "' is not valid JSON: " + e.what());
  }
}

}  // namespace equilink
