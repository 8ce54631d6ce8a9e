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
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "equilink/encoding.hpp"
#include "equilink/paillier.hpp"
#include "equilink/protocol.hpp"
#include "equilink/random.hpp"
#include "equilink/transport.hpp"

namespace equilink {

inline constexpr std::size_t kMinMacKeyBytes = 16;
inline constexpr unsigned kDefaultLinkWidth = 64;

/// One distinct identifier value and every record position that carries it.
struct HashedId {
  EncodedValue value;
  std::vector<std::size_t> source_indices;

  friend bool operator==(const HashedId&, const HashedId&) = default;
};

/// HMAC-SHA256 of `field` under `key`; the first 8 bytes read big-endian,
/// reduced mod 2^w - 1, plus one. Always in [1, 2^w - 1].
/// Throws Errc::config for keys shorter than 16 bytes.
EncodedValue keyed_hash(std::span<const std::uint8_t> key, std::string_view field, unsigned width);

/// keyed_hash over every field, grouped by value and sorted ascending.
std::vector<HashedId> hash_identifiers(std::span<const std::string> fields, std::span<const std::uint8_t> key,
                                       unsigned width);

/// Unhashed integers, grouped and sorted. Every value must be in [1, 2^w - 1].
std::vector<HashedId> raw_identifiers(std::span<const std::uint64_t> values, unsigned width);

/// Expected number of colliding pairs among `distinct` uniform values in
/// [1, 2^w - 1].
double expected_collisions(std::size_t distinct, unsigned width);

struct LinkResult {
  /// (alice record id, bob record id) for every crossing pair of a match.
  std::vector<std::pair<std::int64_t, std::int64_t>> matches;
  std::size_t comparisons_used = 0;
  bool collisions_possible = false;
  double expected_collisions = 0;
  SessionMetrics metrics;
  double total_seconds = 0;
};

/// Alice drives the two-pointer merge: one equality session per step, then
/// an ADVANCE naming which pointer moves. On a match both sides swap the
/// record ids behind the matched value. `record_ids[i]` labels source index
/// i; an empty span labels records by index.
///
/// Throws Errc::precondition unless `ids` is strictly ascending with values
/// in [1, 2^w - 1]. Any transport or protocol failure aborts the session and
/// no partial result is returned.
LinkResult link_as_alice(Channel& channel, const KeyPair& keys, std::span<const HashedId> ids,
                         std::span<const std::int64_t> record_ids, const SessionConfig& cfg, RandomSource& rng);
LinkResult link_as_bob(Channel& channel, std::span<const HashedId> ids, std::span<const std::int64_t> record_ids,
                       const SessionConfig& cfg, RandomSource& rng);

/// Both roles in-process over a loopback channel. Matches are reported as
/// (alice source index, bob source index); metrics combine both parties.
LinkResult sorted_merge_link(std::span<const HashedId> alice_ids, std::span<const HashedId> bob_ids,
                             const SessionConfig& cfg, const KeyPair& keys, RandomSource& alice_rng = system_random(),
                             RandomSource& bob_rng = system_random());

}  // namespace equilink
