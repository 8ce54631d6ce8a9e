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

#include "equilink/linkage.hpp"

#include <openssl/evp.h>
#include <openssl/hmac.h>

#include <chrono>
#include <cmath>
#include <exception>
#include <map>
#include <thread>

#include "equilink/error.hpp"

namespace equilink {
namespace {

using Clock = std::chrono::steady_clock;

constexpr double kCollisionThreshold = 1e-6;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

void check_ids(std::span<const HashedId> ids, std::span<const std::int64_t> record_ids, unsigned width) {
  for (std::size_t i = 0; i < ids.size(); ++i) {
    const auto& id = ids[i];
    if (id.value.width != width) raise(Errc::precondition, "identifier width does not match the session");
    if (id.value.value == 0 || id.value.value > max_value(width)) {
      raise(Errc::precondition, "identifier outside [1, 2^w - 1]");
    }
    if (id.source_indices.empty()) raise(Errc::precondition, "identifier without source records");
    if (i > 0 && ids[i - 1].value.value >= id.value.value) {
      raise(Errc::precondition, "identifiers must be deduplicated and sorted ascending");
    }
    if (!record_ids.empty()) {
      for (auto idx : id.source_indices) {
        if (idx >= record_ids.size()) raise(Errc::precondition, "source index without a record id");
      }
    }
  }
}

std::vector<std::int64_t> labels(const HashedId& id, std::span<const std::int64_t> record_ids) {
  std::vector<std::int64_t> out;
  out.reserve(id.source_indices.size());
  for (auto idx : id.source_indices) {
    out.push_back(record_ids.empty() ? static_cast<std::int64_t>(idx) : record_ids[idx]);
  }
  return out;
}

std::vector<HashedId> group(std::span<const std::uint64_t> values, unsigned width) {
  std::map<std::uint64_t, std::vector<std::size_t>> by_value;
  for (std::size_t i = 0; i < values.size(); ++i) by_value[values[i]].push_back(i);
  std::vector<HashedId> out;
  out.reserve(by_value.size());
  for (auto& [v, idx] : by_value) out.push_back({EncodedValue{v, width}, std::move(idx)});
  return out;
}

void add_crossing_pairs(LinkResult& result, std::span<const std::int64_t> alice, std::span<const std::int64_t> bob) {
  for (auto a : alice) {
    for (auto b : bob) result.matches.emplace_back(a, b);
  }
}

void finish(LinkResult& result, std::size_t alice_count, std::size_t bob_count, const SessionConfig& cfg) {
  if (cfg.leak_mode == LeakMode::hashed) {
    result.expected_collisions = expected_collisions(alice_count + bob_count, cfg.width);
    result.collisions_possible = result.expected_collisions >= kCollisionThreshold;
  }
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

}  // namespace

EncodedValue keyed_hash(std::span<const std::uint8_t> key, std::string_view field, unsigned width) {
  if (key.empty()) raise(Errc::config, "MAC key is empty");
  if (key.size() < kMinMacKeyBytes) raise(Errc::config, "MAC key must be at least 16 bytes");
  const std::uint64_t top = max_value(width);

  unsigned char mac[EVP_MAX_MD_SIZE];
  unsigned int mac_len = 0;
  if (!HMAC(EVP_sha256(), key.data(), static_cast<int>(key.size()),
            reinterpret_cast<const unsigned char*>(field.data()), field.size(), mac, &mac_len) ||
      mac_len < 8) {
    raise(Errc::config, "HMAC-SHA256 failed");
  }
  std::uint64_t v = 0;
  for (int i = 0; i < 8; ++i) v = (v << 8) | mac[i];
  return EncodedValue{v % top + 1, width};
}

std::vector<HashedId> hash_identifiers(std::span<const std::string> fields, std::span<const std::uint8_t> key,
                                       unsigned width) {
  std::vector<std::uint64_t> values;
  values.reserve(fields.size());
  for (const auto& f : fields) values.push_back(keyed_hash(key, f, width).value);
  return group(values, width);
}

std::vector<HashedId> raw_identifiers(std::span<const std::uint64_t> values, unsigned width) {
  for (auto v : values) {
    if (v == 0 || v > max_value(width)) raise(Errc::domain, "raw identifier outside [1, 2^w - 1]");
  }
  return group(values, width);
}

double expected_collisions(std::size_t distinct, unsigned width) {
  const double n = static_cast<double>(distinct);
  const double space = std::ldexp(1.0, static_cast<int>(width)) - 1.0;
  return n * (n - 1.0) / 2.0 / space;
}

LinkResult link_as_alice(Channel& channel, const KeyPair& keys, std::span<const HashedId> ids,
                         std::span<const std::int64_t> record_ids, const SessionConfig& cfg, RandomSource& rng) {
  cfg.validate();
  check_ids(ids, record_ids, cfg.width);
  const auto start = Clock::now();

  Hello mine = cfg.hello(&keys.pub);
  mine.count = ids.size();
  const Hello theirs = handshake_initiator(channel, mine);
  if (theirs.n != keys.pub.modulus() || !theirs.count) {
    channel.abort("bad-key");
    raise(Errc::protocol, "peer did not acknowledge the session key and list size");
  }
  const std::size_t bob_count = *theirs.count;

  LinkResult result;
  std::size_t i = 0;
  std::size_t j = 0;
  std::optional<std::size_t> table_for;
  EncryptionTable table;
  while (i < ids.size() && j < bob_count) {
    // The table only changes when Alice's pointer moves.
    if (table_for != i) {
      const auto t0 = Clock::now();
      table = build_table(keys.pub, ids[i].value, rng);
      result.metrics.table_build += seconds_since(t0);
      table_for = i;
    }
    const ComparisonOutcome outcome = alice_equality(channel, keys, table, cfg, &result.metrics);
    ++result.comparisons_used;

    switch (outcome) {
      case ComparisonOutcome::bob_greater:
        channel.send(make_advance({AdvanceAction::advance_alice, std::nullopt}));
        ++i;
        break;
      case ComparisonOutcome::alice_greater:
        channel.send(make_advance({AdvanceAction::advance_bob, std::nullopt}));
        ++j;
        break;
      case ComparisonOutcome::equal: {
        const auto mine_ids = labels(ids[i], record_ids);
        channel.send(make_advance({AdvanceAction::matched, mine_ids}));
        const Advance reply = parse_advance(channel.expect(MessageKind::advance));
        if (reply.action != AdvanceAction::matched || !reply.ids || reply.ids->empty()) {
          channel.abort("protocol-error");
          raise(Errc::protocol, "expected Bob's matched record ids");
        }
        add_crossing_pairs(result, mine_ids, *reply.ids);
        ++i;
        ++j;
        break;
      }
    }
  }
  finish(result, ids.size(), bob_count, cfg);
  result.total_seconds = seconds_since(start);
  return result;
}

LinkResult link_as_bob(Channel& channel, std::span<const HashedId> ids, std::span<const std::int64_t> record_ids,
                       const SessionConfig& cfg, RandomSource& rng) {
  cfg.validate();
  check_ids(ids, record_ids, cfg.width);
  const auto start = Clock::now();

  Hello mine = cfg.hello(nullptr);
  mine.count = ids.size();
  const Hello theirs = handshake_responder(channel, mine);
  if (!theirs.count) {
    channel.abort("protocol-error");
    raise(Errc::protocol, "linkage HELLO must carry the identifier count");
  }
  const PublicKey pk(theirs.n);
  const std::size_t alice_count = *theirs.count;

  LinkResult result;
  std::size_t i = 0;
  std::size_t j = 0;
  while (i < alice_count && j < ids.size()) {
    const bool equal = bob_equality(channel, pk, ids[j].value, cfg, rng, &result.metrics);
    ++result.comparisons_used;
    const Advance advance = parse_advance(channel.expect(MessageKind::advance));
    if ((advance.action == AdvanceAction::matched) != equal) {
      channel.abort("protocol-error");
      raise(Errc::protocol, "ADVANCE disagrees with RESULT");
    }
    switch (advance.action) {
      case AdvanceAction::advance_alice:
        ++i;
        break;
      case AdvanceAction::advance_bob:
        ++j;
        break;
      case AdvanceAction::matched: {
        if (!advance.ids || advance.ids->empty()) {
          channel.abort("protocol-error");
          raise(Errc::protocol, "matched ADVANCE without record ids");
        }
        const auto mine_ids = labels(ids[j], record_ids);
        channel.send(make_advance({AdvanceAction::matched, mine_ids}));
        add_crossing_pairs(result, *advance.ids, mine_ids);
        ++i;
        ++j;
        break;
      }
    }
  }
  finish(result, alice_count, ids.size(), cfg);
  result.total_seconds = seconds_since(start);
  return result;
}

LinkResult sorted_merge_link(std::span<const HashedId> alice_ids, std::span<const HashedId> bob_ids,
                             const SessionConfig& cfg, const KeyPair& keys, RandomSource& alice_rng,
                             RandomSource& bob_rng) {
  cfg.validate();
  check_ids(alice_ids, {}, cfg.width);
  check_ids(bob_ids, {}, cfg.width);

  auto [alice_end, bob_end] = loopback_pair();
  LinkResult bob_result;
  std::exception_ptr bob_error;
  std::thread bob_thread([&, &ch = bob_end] {
    try {
      bob_result = link_as_bob(ch, bob_ids, {}, cfg, bob_rng);
    } catch (...) {
      bob_error = std::current_exception();
      ch.abort("internal-error");
    }
  });
  LinkResult result;
  std::exception_ptr alice_error;
  try {
    result = link_as_alice(alice_end, keys, alice_ids, {}, cfg, alice_rng);
  } catch (...) {
    alice_error = std::current_exception();
    alice_end.abort("internal-error");
  }
  bob_thread.join();
  if (bob_error && !is_knock_on(bob_error)) std::rethrow_exception(bob_error);
  if (alice_error) std::rethrow_exception(alice_error);
  if (bob_error) std::rethrow_exception(bob_error);

  if (bob_result.matches != result.matches || bob_result.comparisons_used != result.comparisons_used) {
    raise(Errc::protocol, "parties finished the merge with different views");
  }
  result.metrics.message_gen += bob_result.metrics.message_gen;
  result.metrics.combinations += bob_result.metrics.combinations;
  return result;
}

}  // namespace equilink
