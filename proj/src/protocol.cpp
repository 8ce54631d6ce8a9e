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

#include "equilink/protocol.hpp"

#include <chrono>
#include <exception>
#include <thread>

#include "equilink/error.hpp"
#include "equilink/kernels.hpp"

namespace equilink {
namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

EncodedValue protocol_input(std::uint64_t v, const SessionConfig& cfg) {
  EncodedValue out = EncodedValue::make(v, cfg.width);
  if (out.value == 0) raise(Errc::domain, "protocol inputs must be at least 1");
  return out;
}

void check_table_width(Channel& channel, const EncryptionTable& table, const SessionConfig& cfg) {
  if (table.width() != cfg.width) {
    channel.abort("width-mismatch");
    raise(Errc::protocol, "table width does not match the session width");
  }
}

bool any_zero(std::span<const BigInt> plaintexts) {
  for (const auto& m : plaintexts) {
    if (m == 0) return true;
  }
  return false;
}

bool is_knock_on(const std::exception_ptr& error) {
  try {
    std::rethrow_exception(error);
  } catch (const Error& e) {
    return e.code() == Errc::aborted || e.code() == Errc::transport;
  } catch (...) {
    return false;
  }
}

// Runs Alice on the calling thread and Bob on a helper thread over a fresh
// loopback pair. The first failure on either side aborts the other.
template <typename AliceFn, typename BobFn>
void run_loopback(AliceFn&& alice, BobFn&& bob) {
  auto [alice_end, bob_end] = loopback_pair();
  std::exception_ptr bob_error;
  std::thread bob_thread([&, &ch = bob_end] {
    try {
      bob(ch);
    } catch (...) {
      bob_error = std::current_exception();
      ch.abort("internal-error");
    }
  });
  std::exception_ptr alice_error;
  try {
    alice(alice_end);
  } catch (...) {
    alice_error = std::current_exception();
    alice_end.abort("internal-error");
  }
  bob_thread.join();
  // Prefer the root cause over the ABORT or hang-up it caused on the other side.
  if (bob_error && !is_knock_on(bob_error)) std::rethrow_exception(bob_error);
  if (alice_error) std::rethrow_exception(alice_error);
  if (bob_error) std::rethrow_exception(bob_error);
}

PublicKey two_party_handshake_alice(Channel& channel, const SessionConfig& cfg, const KeyPair& keys) {
  const Hello reply = handshake_initiator(channel, cfg.hello(&keys.pub));
  if (reply.n != keys.pub.modulus()) {
    channel.abort("bad-key");
    raise(Errc::protocol, "peer did not acknowledge the session key");
  }
  return keys.pub;
}

PublicKey two_party_handshake_bob(Channel& channel, const SessionConfig& cfg) {
  const Hello theirs = handshake_responder(channel, cfg.hello(nullptr));
  return PublicKey(theirs.n);
}

}  // namespace

void SessionConfig::validate() const {
  if (width == 0 || width > kMaxWidth) raise(Errc::config, "width must be in [1, 64]");
  if (padded() < width) raise(Errc::config, "pad_to must be at least the width");
}

Hello SessionConfig::hello(const PublicKey* pk) const {
  Hello h;
  h.width = width;
  h.pad_to = padded();
  if (pk) {
    h.n = pk->modulus();
    h.g = pk->generator();
  }
  return h;
}

std::string_view to_string(ComparisonOutcome outcome) {
  switch (outcome) {
    case ComparisonOutcome::equal: return "equal";
    case ComparisonOutcome::alice_greater: return "alice_greater";
    case ComparisonOutcome::bob_greater: return "bob_greater";
  }
  return "?";
}

SessionMetrics& SessionMetrics::operator+=(const SessionMetrics& other) {
  table_build += other.table_build;
  message_gen += other.message_gen;
  decrypt_decide += other.decrypt_decide;
  combinations += other.combinations;
  sessions += other.sessions;
  return *this;
}

MessageSet padded_products(const PublicKey& pk, const EncryptionTable& table, std::span<const PrefixString> prefixes,
                           unsigned pad_to, RandomSource& rng, std::size_t& combinations) {
  if (prefixes.size() > pad_to) raise(Errc::domain, "more prefixes than the padded set size");
  MessageSet out = kernels::parallel::prefix_products(pk, table, prefixes, combinations);
  // Bob has no key, so fillers are plain uniform units; one decrypts to 0
  // with probability 1/n.
  while (out.size() < pad_to) out.push_back(random_ciphertext(pk, rng, RandomMode::uniform));
  shuffle(out, rng);
  return out;
}

BobMessages bob_messages(const PublicKey& pk, const EncryptionTable& table, EncodedValue y, const SessionConfig& cfg,
                         RandomSource& rng) {
  cfg.validate();
  y = EncodedValue::make(y.value, y.width);
  if (y.value == 0) raise(Errc::domain, "Bob's value must be at least 1");
  if (y.width != table.width() || y.width != cfg.width) raise(Errc::domain, "value width does not match the table");

  BobMessages out;
  const auto below = zero_encode(EncodedValue{y.value - 1, y.width});
  const auto at = zero_encode(y);
  out.below = padded_products(pk, table, below, cfg.padded(), rng, out.combinations);
  out.at = padded_products(pk, table, at, cfg.padded(), rng, out.combinations);
  return out;
}

ComparisonOutcome alice_decide(const KeyPair& keys, const MessageSet& first, const MessageSet& second,
                               const SessionConfig& cfg, std::optional<SetOrder> known_order) {
  if (first.size() != cfg.padded() || second.size() != cfg.padded()) {
    raise(Errc::protocol, "message sets must each hold exactly pad_to ciphertexts");
  }
  MessageSet all;
  all.reserve(first.size() + second.size());
  all.insert(all.end(), first.begin(), first.end());
  all.insert(all.end(), second.begin(), second.end());
  const std::vector<BigInt> plain = kernels::parallel::decrypt(keys.pub, keys.priv, all);
  const std::span<const BigInt> view(plain);
  const bool zero_first = any_zero(view.first(first.size()));
  const bool zero_second = any_zero(view.subspan(first.size()));

  if (known_order) {
    const bool zero_at = *known_order == SetOrder::below_first ? zero_second : zero_first;
    const bool zero_below = *known_order == SetOrder::below_first ? zero_first : zero_second;
    if (zero_at && !zero_below) raise(Errc::protocol, "zero in the y set but not in the y-1 set");
  }
  if (zero_first && zero_second) return ComparisonOutcome::alice_greater;
  if (zero_first || zero_second) return ComparisonOutcome::equal;
  return ComparisonOutcome::bob_greater;
}

ComparisonOutcome alice_equality(Channel& channel, const KeyPair& keys, const EncryptionTable& table,
                                 const SessionConfig& cfg, SessionMetrics* metrics) {
  channel.send(make_table(table));
  const WireMessage reply = channel.expect(MessageKind::products);

  const auto start = Clock::now();
  Products products;
  try {
    products = parse_products(reply, keys.pub);
  } catch (const Error&) {
    channel.abort("malformed-products");
    throw;
  }
  std::optional<SetOrder> order;
  if (!cfg.randomize_set_order) order = SetOrder::below_first;
  ComparisonOutcome outcome;
  try {
    outcome = alice_decide(keys, products.set_a, products.set_b, cfg, order);
  } catch (const Error&) {
    channel.abort("protocol-error");
    throw;
  }
  if (metrics) {
    metrics->decrypt_decide += seconds_since(start);
    ++metrics->sessions;
  }
  channel.send(make_result(outcome == ComparisonOutcome::equal));
  return outcome;
}

bool bob_equality(Channel& channel, const PublicKey& pk, EncodedValue y, const SessionConfig& cfg, RandomSource& rng,
                  SessionMetrics* metrics) {
  EncryptionTable table;
  try {
    table = parse_table(channel.expect(MessageKind::table), pk);
  } catch (const Error& e) {
    if (e.code() != Errc::aborted && e.code() != Errc::transport) channel.abort("malformed-table");
    throw;
  }
  check_table_width(channel, table, cfg);

  const auto start = Clock::now();
  BobMessages msgs = bob_messages(pk, table, y, cfg, rng);
  const bool swap = cfg.randomize_set_order && rng.coin();
  Products products;
  products.set_a = swap ? std::move(msgs.at) : std::move(msgs.below);
  products.set_b = swap ? std::move(msgs.below) : std::move(msgs.at);
  if (metrics) {
    metrics->message_gen += seconds_since(start);
    metrics->combinations += msgs.combinations;
    ++metrics->sessions;
  }
  channel.send(make_products(products));
  return parse_result(channel.expect(MessageKind::result));
}

ComparisonOutcome run_equality_alice(Channel& channel, const KeyPair& keys, EncodedValue x, const SessionConfig& cfg,
                                     RandomSource& rng, SessionMetrics* metrics) {
  const auto start = Clock::now();
  const EncryptionTable table = build_table(keys.pub, x, rng);
  if (metrics) metrics->table_build += seconds_since(start);
  return alice_equality(channel, keys, table, cfg, metrics);
}

std::vector<EqualityRun> run_equality_batch(std::span<const std::pair<std::uint64_t, std::uint64_t>> pairs,
                                            const SessionConfig& cfg, const KeyPair& keys, RandomSource& alice_rng,
                                            RandomSource& bob_rng, SessionMetrics* alice_metrics,
                                            SessionMetrics* bob_metrics) {
  cfg.validate();
  std::vector<EqualityRun> runs(pairs.size());
  for (const auto& [x, y] : pairs) {
    protocol_input(x, cfg);
    protocol_input(y, cfg);
  }
  run_loopback(
      [&](Channel& ch) {
        two_party_handshake_alice(ch, cfg, keys);
        for (std::size_t i = 0; i < pairs.size(); ++i) {
          runs[i].outcome = run_equality_alice(ch, keys, protocol_input(pairs[i].first, cfg), cfg, alice_rng,
                                               alice_metrics);
          runs[i].alice_view = runs[i].outcome == ComparisonOutcome::equal;
        }
      },
      [&](Channel& ch) {
        const PublicKey pk = two_party_handshake_bob(ch, cfg);
        for (std::size_t i = 0; i < pairs.size(); ++i) {
          runs[i].bob_view = bob_equality(ch, pk, protocol_input(pairs[i].second, cfg), cfg, bob_rng, bob_metrics);
        }
      });
  return runs;
}

EqualityRun run_equality(std::uint64_t x, std::uint64_t y, const SessionConfig& cfg, const KeyPair& keys,
                         RandomSource& alice_rng, RandomSource& bob_rng) {
  const std::pair<std::uint64_t, std::uint64_t> pair{x, y};
  return run_equality_batch(std::span(&pair, 1), cfg, keys, alice_rng, bob_rng).front();
}

// ---------------------------------------------------------------------------

bool greater_than_holder(Channel& channel, const KeyPair& keys, EncodedValue x, const SessionConfig& cfg,
                         RandomSource& rng) {
  const EncryptionTable table = build_table(keys.pub, x, rng);
  channel.send(make_table(table));
  Products products;
  try {
    products = parse_products(channel.expect(MessageKind::products), keys.pub);
  } catch (const Error& e) {
    if (e.code() != Errc::aborted && e.code() != Errc::transport) channel.abort("malformed-products");
    throw;
  }
  if (products.set_a.size() != cfg.padded() || !products.set_b.empty()) {
    channel.abort("protocol-error");
    raise(Errc::protocol, "greater-than reply must be one set of pad_to ciphertexts");
  }
  const auto plain = kernels::parallel::decrypt(keys.pub, keys.priv, products.set_a);
  return any_zero(plain);
}

void greater_than_evaluator(Channel& channel, const PublicKey& holder_pk, EncodedValue y, const SessionConfig& cfg,
                            RandomSource& rng) {
  y = EncodedValue::make(y.value, y.width);
  EncryptionTable table;
  try {
    table = parse_table(channel.expect(MessageKind::table), holder_pk);
  } catch (const Error& e) {
    if (e.code() != Errc::aborted && e.code() != Errc::transport) channel.abort("malformed-table");
    throw;
  }
  check_table_width(channel, table, cfg);
  std::size_t combinations = 0;
  const auto prefixes = zero_encode(y);
  Products products;
  products.set_a = padded_products(holder_pk, table, prefixes, cfg.padded(), rng, combinations);
  channel.send(make_products(products));
}

std::vector<bool> greater_than_batch(std::span<const std::pair<std::uint64_t, std::uint64_t>> pairs,
                                     const SessionConfig& cfg, const KeyPair& keys, RandomSource& alice_rng,
                                     RandomSource& bob_rng) {
  cfg.validate();
  for (const auto& [x, y] : pairs) {
    protocol_input(x, cfg);
    EncodedValue::make(y, cfg.width);
  }
  std::vector<bool> out(pairs.size());
  run_loopback(
      [&](Channel& ch) {
        two_party_handshake_alice(ch, cfg, keys);
        for (std::size_t i = 0; i < pairs.size(); ++i) {
          out[i] = greater_than_holder(ch, keys, protocol_input(pairs[i].first, cfg), cfg, alice_rng);
        }
      },
      [&](Channel& ch) {
        const PublicKey pk = two_party_handshake_bob(ch, cfg);
        for (const auto& pair : pairs) {
          greater_than_evaluator(ch, pk, EncodedValue::make(pair.second, cfg.width), cfg, bob_rng);
        }
      });
  return out;
}

bool greater_than(std::uint64_t x, std::uint64_t y, const SessionConfig& cfg, const KeyPair& keys) {
  const std::pair<std::uint64_t, std::uint64_t> pair{x, y};
  return greater_than_batch(std::span(&pair, 1), cfg, keys, system_random(), system_random()).front();
}

// ---------------------------------------------------------------------------

bool equality_four_round_alice(Channel& channel, const KeyPair& alice_keys, const PublicKey& bob_pk, EncodedValue x,
                               const SessionConfig& cfg, RandomSource& rng) {
  const bool alice_greater = greater_than_holder(channel, alice_keys, x, cfg, rng);
  greater_than_evaluator(channel, bob_pk, x, cfg, rng);
  const bool bob_not_greater = parse_result(channel.expect(MessageKind::result));
  const bool equal = !alice_greater && bob_not_greater;
  channel.send(make_result(equal));
  return equal;
}

bool equality_four_round_bob(Channel& channel, const KeyPair& bob_keys, const PublicKey& alice_pk, EncodedValue y,
                             const SessionConfig& cfg, RandomSource& rng) {
  greater_than_evaluator(channel, alice_pk, y, cfg, rng);
  const bool bob_greater = greater_than_holder(channel, bob_keys, y, cfg, rng);
  channel.send(make_result(!bob_greater));
  return parse_result(channel.expect(MessageKind::result));
}

std::vector<bool> equality_four_round_batch(std::span<const std::pair<std::uint64_t, std::uint64_t>> pairs,
                                            const SessionConfig& cfg, const KeyPair& alice_keys,
                                            const KeyPair& bob_keys, RandomSource& alice_rng, RandomSource& bob_rng) {
  cfg.validate();
  for (const auto& [x, y] : pairs) {
    protocol_input(x, cfg);
    protocol_input(y, cfg);
  }
  std::vector<bool> alice_out(pairs.size());
  std::vector<bool> bob_out(pairs.size());
  run_loopback(
      [&](Channel& ch) {
        const Hello reply = handshake_initiator(ch, cfg.hello(&alice_keys.pub));
        const PublicKey bob_pk(reply.n);
        for (std::size_t i = 0; i < pairs.size(); ++i) {
          alice_out[i] = equality_four_round_alice(ch, alice_keys, bob_pk, protocol_input(pairs[i].first, cfg), cfg,
                                                   alice_rng);
        }
      },
      [&](Channel& ch) {
        const Hello theirs = handshake_responder(ch, cfg.hello(&bob_keys.pub));
        const PublicKey alice_pk(theirs.n);
        for (std::size_t i = 0; i < pairs.size(); ++i) {
          bob_out[i] = equality_four_round_bob(ch, bob_keys, alice_pk, protocol_input(pairs[i].second, cfg), cfg,
                                               bob_rng);
        }
      });
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    if (alice_out[i] != bob_out[i]) raise(Errc::protocol, "parties disagree on the four-round result");
  }
  return alice_out;
}

bool equality_four_round(std::uint64_t x, std::uint64_t y, const SessionConfig& cfg, const KeyPair& alice_keys,
                         const KeyPair& bob_keys) {
  const std::pair<std::uint64_t, std::uint64_t> pair{x, y};
  return equality_four_round_batch(std::span(&pair, 1), cfg, alice_keys, bob_keys, system_random(), system_random())
      .front();
}

}  // namespace equilink
