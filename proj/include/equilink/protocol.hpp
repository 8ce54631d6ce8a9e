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
#include <optional>
#include <span>
#include <string_view>
#include <utility>
#include <vector>

#include "equilink/encoding.hpp"
#include "equilink/paillier.hpp"
#include "equilink/random.hpp"
#include "equilink/transport.hpp"

namespace equilink {

/// Whether session inputs went through the keyed hash. Raw inputs expose
/// the order relation between the parties' plaintexts.
enum class LeakMode { hashed, raw };

struct SessionConfig {
  unsigned width = kDefaultWidth;
  /// Messages per set; 0 means `width`, the largest possible 0-encoding.
  unsigned pad_to = 0;
  LeakMode leak_mode = LeakMode::hashed;
  std::size_t key_bits = 2048;
  /// Bob sends the (y-1, y) sets in a coin-flip order.
  bool randomize_set_order = true;

  unsigned padded() const noexcept { return pad_to == 0 ? width : pad_to; }
  /// Throws Errc::config if width is outside [1, 64] or pad_to < width.
  void validate() const;
  Hello hello(const PublicKey* pk) const;
};

using MessageSet = std::vector<Ciphertext>;

enum class ComparisonOutcome { equal, alice_greater, bob_greater };
std::string_view to_string(ComparisonOutcome outcome);

/// Which of Bob's two sets travels first on the wire.
enum class SetOrder { below_first, at_first };

/// Bob's reply before ordering: `below` derives from zero_encode(y - 1),
/// `at` from zero_encode(y). Both are padded to cfg.padded() and permuted.
struct BobMessages {
  MessageSet below;
  MessageSet at;
  std::size_t combinations = 0;
};

/// Throws Errc::domain for y = 0.
BobMessages bob_messages(const PublicKey& pk, const EncryptionTable& table, EncodedValue y, const SessionConfig& cfg,
                         RandomSource& rng);

/// Products for each prefix, then uniform filler up to `pad_to`, shuffled.
MessageSet padded_products(const PublicKey& pk, const EncryptionTable& table, std::span<const PrefixString> prefixes,
                           unsigned pad_to, RandomSource& rng, std::size_t& combinations);

/// Decrypts both sets. Exactly one set holding a zero means EQUAL, both
/// means ALICE_GREATER, neither means BOB_GREATER. When the wire order is
/// known, a zero only in the y-set is reported as Errc::protocol since it is
/// impossible for honest inputs. Wrong set sizes are Errc::protocol too.
ComparisonOutcome alice_decide(const KeyPair& keys, const MessageSet& first, const MessageSet& second,
                               const SessionConfig& cfg, std::optional<SetOrder> known_order = std::nullopt);

/// Wall-clock seconds per phase plus operation counts, accumulated across
/// sessions. Each party fills in the phases it runs.
struct SessionMetrics {
  double table_build = 0;
  double message_gen = 0;
  double decrypt_decide = 0;
  std::size_t combinations = 0;
  std::size_t sessions = 0;

  SessionMetrics& operator+=(const SessionMetrics& other);
};

// ---------------------------------------------------------------------------
// Two-round equality. After the handshake one session is exactly three
// flights: TABLE (Alice), PRODUCTS (Bob), RESULT (Alice).

/// Alice's side with a prebuilt table. Returns the full outcome; Bob is told
/// only whether the values are equal.
ComparisonOutcome alice_equality(Channel& channel, const KeyPair& keys, const EncryptionTable& table,
                                 const SessionConfig& cfg, SessionMetrics* metrics = nullptr);

/// Bob's side. Returns the equality bit Alice reports.
bool bob_equality(Channel& channel, const PublicKey& pk, EncodedValue y, const SessionConfig& cfg, RandomSource& rng,
                  SessionMetrics* metrics = nullptr);

ComparisonOutcome run_equality_alice(Channel& channel, const KeyPair& keys, EncodedValue x, const SessionConfig& cfg,
                                     RandomSource& rng, SessionMetrics* metrics = nullptr);
inline bool run_equality_bob(Channel& channel, const PublicKey& pk, EncodedValue y, const SessionConfig& cfg,
                             RandomSource& rng, SessionMetrics* metrics = nullptr) {
  return bob_equality(channel, pk, y, cfg, rng, metrics);
}

struct EqualityRun {
  bool alice_view = false;
  bool bob_view = false;
  ComparisonOutcome outcome = ComparisonOutcome::equal;
};

/// Both parties in-process over a loopback channel, one handshake then one
/// session per pair. Alice's and Bob's random sources each stay on their own
/// thread.
std::vector<EqualityRun> run_equality_batch(std::span<const std::pair<std::uint64_t, std::uint64_t>> pairs,
                                            const SessionConfig& cfg, const KeyPair& keys, RandomSource& alice_rng,
                                            RandomSource& bob_rng, SessionMetrics* alice_metrics = nullptr,
                                            SessionMetrics* bob_metrics = nullptr);

EqualityRun run_equality(std::uint64_t x, std::uint64_t y, const SessionConfig& cfg, const KeyPair& keys,
                         RandomSource& alice_rng = system_random(), RandomSource& bob_rng = system_random());

// ---------------------------------------------------------------------------
// Greater-than: the table holder learns whether its value exceeds the
// evaluator's. PRODUCTS carries the padded zero_encode(y) set in set_a and
// an empty set_b.

bool greater_than_holder(Channel& channel, const KeyPair& keys, EncodedValue x, const SessionConfig& cfg,
                         RandomSource& rng);
void greater_than_evaluator(Channel& channel, const PublicKey& holder_pk, EncodedValue y, const SessionConfig& cfg,
                            RandomSource& rng);

/// Loopback batch; result[i] is x_i > y_i as learned by Alice.
std::vector<bool> greater_than_batch(std::span<const std::pair<std::uint64_t, std::uint64_t>> pairs,
                                     const SessionConfig& cfg, const KeyPair& keys, RandomSource& alice_rng,
                                     RandomSource& bob_rng);

bool greater_than(std::uint64_t x, std::uint64_t y, const SessionConfig& cfg, const KeyPair& keys);

// ---------------------------------------------------------------------------
// Four-round equality: greater_than in both directions, each party holding
// its own key. Used as an independent check on the two-round protocol.
// Flights: TABLE(A), PRODUCTS(B), TABLE(B), PRODUCTS(A), RESULT(B), RESULT(A).

bool equality_four_round_alice(Channel& channel, const KeyPair& alice_keys, const PublicKey& bob_pk, EncodedValue x,
                               const SessionConfig& cfg, RandomSource& rng);
bool equality_four_round_bob(Channel& channel, const KeyPair& bob_keys, const PublicKey& alice_pk, EncodedValue y,
                             const SessionConfig& cfg, RandomSource& rng);

std::vector<bool> equality_four_round_batch(std::span<const std::pair<std::uint64_t, std::uint64_t>> pairs,
                                            const SessionConfig& cfg, const KeyPair& alice_keys,
                                            const KeyPair& bob_keys, RandomSource& alice_rng, RandomSource& bob_rng);

bool equality_four_round(std::uint64_t x, std::uint64_t y, const SessionConfig& cfg, const KeyPair& alice_keys,
                         const KeyPair& bob_keys);

}  // namespace equilink
