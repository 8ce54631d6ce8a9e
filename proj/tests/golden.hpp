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

// Reference messages for the frozen frames under tests/fixtures. Each
// fixture was produced by a separate script from the same plaintexts and
// randomizers, so comparing bytes checks ciphertexts, JSON layout and
// framing together.

#include <cstdint>
#include <fstream>
#include <iterator>
#include <string>
#include <vector>

#include "equilink/encoding.hpp"
#include "equilink/paillier.hpp"
#include "equilink/random.hpp"
#include "equilink/transport.hpp"
#include "test_support.hpp"

namespace equilink::testing {

struct GoldenFrame {
  std::string name;
  WireMessage message;
};

inline std::vector<std::uint8_t> read_fixture(const std::string& name) {
  std::ifstream in(std::string(EQUILINK_FIXTURE_DIR) + "/" + name + ".frame", std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

/// x = 5 at w = 3: zero cells use r = 1000 + pos, the others encrypt
/// 7 * pos with r = 2000 + pos.
inline EncryptionTable golden_table() {
  const PublicKey& pk = key64().pub;
  const std::uint64_t x = 5;
  std::vector<std::array<Ciphertext, 2>> columns(3);
  for (unsigned pos = 1; pos <= 3; ++pos) {
    const unsigned bit = (x >> (pos - 1)) & 1U;
    columns[pos - 1][bit] = encrypt_with(pk, 0, 1000 + pos);
    columns[pos - 1][1 - bit] = encrypt_with(pk, 7 * pos, 2000 + pos);
  }
  return EncryptionTable(3, std::move(columns));
}

inline Products golden_products() {
  const PublicKey& pk = key64().pub;
  return {{encrypt_with(pk, 0, 3), encrypt_with(pk, 11, 5)}, {encrypt_with(pk, 12, 7)}};
}

inline Hello golden_hello() {
  Hello h;
  h.width = 3;
  h.pad_to = 3;
  h.n = key64().pub.modulus();
  h.g = key64().pub.generator();
  return h;
}

inline std::vector<GoldenFrame> golden_frames() {
  return {
      {"hello", make_hello(golden_hello())},
      {"table", make_table(golden_table())},
      {"products", make_products(golden_products())},
      {"result", make_result(true)},
      {"advance", make_advance({AdvanceAction::matched, std::vector<std::int64_t>{7, 9}})},
      {"abort", make_abort("width-mismatch")},
  };
}

inline Ciphertext random_cipher(RandomSource& rng) { return random_ciphertext(key64().pub, rng); }

/// Any kind, with a random but well-formed body.
inline WireMessage random_message(RandomSource& rng) {
  switch (rng.below(6)) {
    case 0: {
      Hello h;
      h.width = 1 + static_cast<unsigned>(rng.below(64));
      h.pad_to = h.width + static_cast<unsigned>(rng.below(8));
      h.n = key64().pub.modulus();
      h.g = key64().pub.generator();
      if (rng.coin()) h.count = rng.next_u64();
      return make_hello(h);
    }
    case 1: {
      const unsigned w = 1 + static_cast<unsigned>(rng.below(8));
      std::vector<std::array<Ciphertext, 2>> cols(w);
      for (auto& col : cols) col = {random_cipher(rng), random_cipher(rng)};
      return make_table(EncryptionTable(w, std::move(cols)));
    }
    case 2: {
      Products p;
      p.set_a.resize(rng.below(10));
      p.set_b.resize(rng.below(10));
      for (auto& c : p.set_a) c = random_cipher(rng);
      for (auto& c : p.set_b) c = random_cipher(rng);
      return make_products(p);
    }
    case 3:
      return make_result(rng.coin());
    case 4: {
      Advance a;
      a.action = static_cast<AdvanceAction>(rng.below(3));
      if (a.action == AdvanceAction::matched) {
        a.ids.emplace(1 + rng.below(4));
        for (auto& id : *a.ids) id = static_cast<std::int64_t>(rng.below(1'000'000'000));
      }
      return make_advance(a);
    }
    default: {
      std::string reason(1 + rng.below(20), 'a');
      for (auto& ch : reason) ch = static_cast<char>('a' + rng.below(26));
      return make_abort(reason);
    }
  }
}

}  // namespace equilink::testing
