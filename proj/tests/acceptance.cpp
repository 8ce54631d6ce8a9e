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

// Acceptance checks. Prints one PASS/FAIL line per criterion and exits
// nonzero if any fails. Pass criterion numbers as arguments to run a subset.

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <set>
#include <string>
#include <thread>
#include <vector>

#include "equilink/datagen.hpp"
#include "equilink/error.hpp"
#include "equilink/linkage.hpp"
#include "equilink/protocol.hpp"
#include "golden.hpp"
#include "test_support.hpp"

using namespace equilink;
using equilink::testing::key512;
using equilink::testing::key64;
using equilink::testing::key64_bob;
using equilink::testing::tiny_key;

namespace {

using PairList = std::vector<std::pair<std::uint64_t, std::uint64_t>>;

struct Check {
  bool ok = true;
  std::string detail;

  void fail(const std::string& why) {
    if (ok) detail = why;
    ok = false;
  }
};

std::string fmt(const char* format, auto... args) {
  char buf[256];
  std::snprintf(buf, sizeof buf, format, args...);
  return buf;
}

SessionConfig session(unsigned width, std::size_t key_bits = 64) {
  SessionConfig cfg;
  cfg.width = width;
  cfg.key_bits = key_bits;
  return cfg;
}

PairList full_grid(std::uint64_t hi) {
  PairList pairs;
  pairs.reserve(hi * hi);
  for (std::uint64_t x = 1; x <= hi; ++x) {
    for (std::uint64_t y = 1; y <= hi; ++y) pairs.emplace_back(x, y);
  }
  return pairs;
}

ComparisonOutcome sign_of(std::uint64_t x, std::uint64_t y) {
  if (x == y) return ComparisonOutcome::equal;
  return x > y ? ComparisonOutcome::alice_greater : ComparisonOutcome::bob_greater;
}

bool is_zero(const KeyPair& keys, const Ciphertext& c) { return decrypt(keys.pub, keys.priv, c) == 0; }

std::size_t zeros(const KeyPair& keys, const MessageSet& set) {
  return static_cast<std::size_t>(std::count_if(set.begin(), set.end(), [&](const auto& c) { return is_zero(keys, c); }));
}

Check exhaustive_equality() {
  const PairList pairs = full_grid(255);
  DeterministicRandom alice_rng(101), bob_rng(102);
  const auto runs = run_equality_batch(pairs, session(8), key64(), alice_rng, bob_rng);
  std::size_t errors = 0;
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    const bool expected = pairs[i].first == pairs[i].second;
    if (runs[i].alice_view != expected || runs[i].bob_view != expected) ++errors;
  }
  Check c{errors == 0, fmt("%zu pairs, %zu errors", pairs.size(), errors)};
  return c;
}

Check exhaustive_greater_than() {
  const PairList pairs = full_grid(255);
  DeterministicRandom alice_rng(201), bob_rng(202);
  const auto gt = greater_than_batch(pairs, session(8), key64(), alice_rng, bob_rng);
  std::size_t errors = 0;
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    if (gt[i] != (pairs[i].first > pairs[i].second)) ++errors;
  }
  return {errors == 0, fmt("%zu pairs, %zu errors", pairs.size(), errors)};
}

Check four_round_agreement() {
  DeterministicRandom pick(301);
  PairList pairs;
  std::size_t equal = 0;
  for (int i = 0; i < 5000; ++i) {
    const std::uint64_t x = 1 + pick.below(65535);
    const std::uint64_t y = i % 3 == 0 ? x : 1 + pick.below(65535);
    equal += x == y;
    pairs.emplace_back(x, y);
  }
  const SessionConfig cfg = session(16);
  DeterministicRandom a1(302), b1(303), a2(304), b2(305);
  const auto four = equality_four_round_batch(pairs, cfg, key64(), key64_bob(), a1, b1);
  const auto two = run_equality_batch(pairs, cfg, key64(), a2, b2);
  std::size_t disagreements = 0;
  std::size_t wrong = 0;
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    disagreements += four[i] != two[i].alice_view;
    wrong += four[i] != (pairs[i].first == pairs[i].second);
  }
  return {disagreements == 0 && wrong == 0,
          fmt("%zu pairs (%zu equal), %zu disagreements, %zu wrong", pairs.size(), equal, disagreements, wrong)};
}

struct Trace {
  std::vector<std::vector<std::uint8_t>> frames;
  std::vector<WireMessage> messages;
  ComparisonOutcome outcome = ComparisonOutcome::bob_greater;
  bool bob_view = false;
};

/// One x = y = 5 session at w = 3 with fixed randomness and a fixed set order.
Trace worked_example_trace() {
  SessionConfig cfg = session(3);
  cfg.randomize_set_order = false;
  const KeyPair& keys = key64();
  auto [alice, bob] = loopback_pair();
  Trace trace;
  alice.set_tap([&](Direction, const WireMessage& msg, std::span<const std::uint8_t> frame) {
    if (msg.kind == MessageKind::hello) return;
    trace.messages.push_back(msg);
    trace.frames.emplace_back(frame.begin(), frame.end());
  });
  std::thread bob_thread([&, &ch = bob] {
    DeterministicRandom rng(402);
    const Hello h = handshake_responder(ch, cfg.hello(nullptr));
    trace.bob_view = bob_equality(ch, PublicKey(h.n), {5, 3}, cfg, rng);
  });
  DeterministicRandom rng(401);
  handshake_initiator(alice, cfg.hello(&keys.pub));
  trace.outcome = run_equality_alice(alice, keys, {5, 3}, cfg, rng);
  bob_thread.join();
  return trace;
}

Check golden_trace() {
  const KeyPair& keys = key64();
  const Trace trace = worked_example_trace();
  Check c;
  if (trace.messages.size() != 3) {
    c.fail(fmt("%zu flights", trace.messages.size()));
    return c;
  }
  if (trace.messages[0].kind != MessageKind::table || trace.messages[1].kind != MessageKind::products ||
      trace.messages[2].kind != MessageKind::result) {
    c.fail("flight kinds are not TABLE, PRODUCTS, RESULT");
    return c;
  }
  const EncryptionTable table = parse_table(trace.messages[0], keys.pub);
  const unsigned bits_of_5[] = {1, 0, 1};  // positions 1..3
  for (unsigned pos = 1; pos <= 3; ++pos) {
    const unsigned b = bits_of_5[pos - 1];
    if (!is_zero(keys, table.cell(pos, b)) || is_zero(keys, table.cell(pos, 1 - b))) {
      c.fail(fmt("table column %u is not (E(0) at the bit, nonzero beside it)", pos));
    }
  }
  if (!is_zero(keys, select_product(keys.pub, table, PrefixString::parse("101")))) c.fail("product for 101 nonzero");
  if (is_zero(keys, select_product(keys.pub, table, PrefixString::parse("11")))) c.fail("product for 11 is zero");

  const Products products = parse_products(trace.messages[1], keys.pub);
  // Order is fixed: set_a from y - 1 = 4 ("11", "101"), set_b from y = 5 ("11").
  if (products.set_a.size() != 3 || products.set_b.size() != 3) c.fail("sets are not padded to 3");
  if (zeros(keys, products.set_a) != 1) c.fail("y-1 set does not hold exactly one zero");
  if (zeros(keys, products.set_b) != 0) c.fail("y set holds a zero");
  if (!parse_result(trace.messages[2]) || !trace.bob_view) c.fail("RESULT is not equal");
  if (trace.outcome != ComparisonOutcome::equal) c.fail("verdict is not EQUAL");
  if (worked_example_trace().frames != trace.frames) c.fail("trace is not reproducible under fixed randomness");
  if (c.ok) {
    std::size_t bytes = 0;
    for (const auto& f : trace.frames) bytes += f.size();
    c.detail = fmt("TABLE/PRODUCTS/RESULT, 101 -> 0, 11 -> nonzero, EQUAL, %zu bytes reproducible", bytes);
  }
  return c;
}

std::size_t hex_strings(const nlohmann::json& j) {
  if (j.is_string()) return 1;
  std::size_t n = 0;
  if (j.is_array() || j.is_object()) {
    for (const auto& [key, v] : j.items()) {
      if (key != "pos") n += hex_strings(v);
    }
  }
  return n;
}

Check budgets() {
  const KeyPair& keys = key64();
  Check c;
  std::size_t sessions = 0;
  std::size_t max_combinations = 0;
  for (unsigned pad : {0U, 12U}) {
    SessionConfig cfg = session(8);
    cfg.pad_to = pad;
    const unsigned w = cfg.width;
    const unsigned p = cfg.padded();
    DeterministicRandom pick(500 + pad);
    std::vector<std::uint64_t> xs, ys;
    for (int i = 0; i < 200; ++i) {
      xs.push_back(1 + pick.below(255));
      ys.push_back(i % 4 == 0 ? xs.back() : 1 + pick.below(255));
    }

    auto [alice, bob] = loopback_pair();
    std::vector<MessageKind> flights;
    std::vector<std::size_t> table_cipher, product_cipher;
    alice.set_tap([&](Direction, const WireMessage& msg, std::span<const std::uint8_t>) {
      if (msg.kind == MessageKind::hello) return;
      flights.push_back(msg.kind);
      if (msg.kind == MessageKind::table) table_cipher.push_back(hex_strings(msg.body));
      if (msg.kind == MessageKind::products) product_cipher.push_back(hex_strings(msg.body));
    });
    std::vector<std::size_t> combos;
    std::thread bob_thread([&, &ch = bob] {
      const Hello h = handshake_responder(ch, cfg.hello(nullptr));
      const PublicKey pk(h.n);
      for (auto y : ys) {
        SessionMetrics m;
        bob_equality(ch, pk, {y, w}, cfg, system_random(), &m);
        combos.push_back(m.combinations);
      }
    });
    handshake_initiator(alice, cfg.hello(&keys.pub));
    for (std::size_t i = 0; i < xs.size(); ++i) {
      const std::size_t before = flights.size();
      const EncryptionTable table = build_table(keys.pub, {xs[i], w}, system_random());
      alice.send(make_table(table));
      const Products products = parse_products(alice.expect(MessageKind::products), keys.pub);
      // Alice decides here, having seen exactly two flights of this session.
      if (flights.size() - before != 2) c.fail("more than two flights before the verdict");
      const auto outcome = alice_decide(keys, products.set_a, products.set_b, cfg);
      if (outcome != sign_of(xs[i], ys[i])) c.fail("wrong verdict");
      alice.send(make_result(outcome == ComparisonOutcome::equal));
      if (flights.size() - before != 3) c.fail("session is not three flights");
    }
    bob_thread.join();

    for (auto n : table_cipher) {
      if (n != 2 * w) c.fail(fmt("TABLE holds %zu ciphertexts, expected %u", n, 2 * w));
    }
    for (auto n : product_cipher) {
      if (n != 2 * p) c.fail(fmt("PRODUCTS holds %zu ciphertexts, expected %u", n, 2 * p));
    }
    for (auto n : combos) {
      if (n > 2 * w * w) c.fail(fmt("%zu multiplications exceed 2w^2 = %u", n, 2 * w * w));
      max_combinations = std::max(max_combinations, n);
    }
    if (table_cipher.size() != xs.size() || product_cipher.size() != xs.size()) c.fail("missing frames");
    sessions += xs.size();
  }
  if (c.ok) {
    c.detail = fmt("%zu sessions at w=8, pad 8 and 12: TABLE 2w, PRODUCTS 2*pad, max %zu <= 128 mults, 2 flights",
                   sessions, max_combinations);
  }
  return c;
}

Check scaled_linkage() {
  const auto start = std::chrono::steady_clock::now();
  const DatasetPair data = generate_pair(1000, 1000, 600, 2026);
  const std::string mac_text = "acceptance MAC key, not secret";
  const std::vector<std::uint8_t> mac(mac_text.begin(), mac_text.end());

  std::vector<std::string> ssn_a, ssn_b;
  for (const auto& r : data.a) ssn_a.push_back(r.ssn);
  for (const auto& r : data.b) ssn_b.push_back(r.ssn);
  const auto alice_ids = hash_identifiers(ssn_a, mac, 64);
  const auto bob_ids = hash_identifiers(ssn_b, mac, 64);

  SessionConfig cfg = session(64, 512);
  DeterministicRandom alice_rng(601), bob_rng(602);
  const LinkResult r = sorted_merge_link(alice_ids, bob_ids, cfg, key512(), alice_rng, bob_rng);

  std::set<std::pair<std::int64_t, std::int64_t>> found;
  for (const auto& [ia, ib] : r.matches) {
    found.emplace(data.a[static_cast<std::size_t>(ia)].id, data.b[static_cast<std::size_t>(ib)].id);
  }
  std::set<std::int64_t> ids_a;
  for (const auto& rec : data.a) ids_a.insert(rec.id);
  std::set<std::pair<std::int64_t, std::int64_t>> truth;
  for (const auto& rec : data.b) {
    if (ids_a.contains(rec.id)) truth.emplace(rec.id, rec.id);
  }
  std::size_t false_pairs = 0;
  for (const auto& p : found) false_pairs += !truth.contains(p);
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

  Check c;
  if (truth.size() != 600) c.fail(fmt("ground truth has %zu ids", truth.size()));
  if (found != truth || r.matches.size() != truth.size()) c.fail("recovered pairs differ from the id intersection");
  if (r.comparisons_used > 2000) c.fail(fmt("%zu comparisons", r.comparisons_used));
  const std::string summary = fmt("%zu/%zu matched, %zu false, %zu comparisons, 512-bit key", found.size() - false_pairs,
                                  truth.size(), false_pairs, r.comparisons_used);
  c.detail = c.ok ? summary : c.detail + "; " + summary;
  return c;
}

Check paillier_properties() {
  Check c;
  const KeyPair& big = key512();
  DeterministicRandom rng(701);
  for (int i = 0; i < 1000; ++i) {
    const BigInt a = rng.below(big.pub.modulus());
    const BigInt b = rng.below(big.pub.modulus());
    const Ciphertext sum = add_encrypted(big.pub, encrypt(big.pub, a, rng), encrypt(big.pub, b, rng));
    const BigInt expected = (a + b) % big.pub.modulus();
    if (decrypt(big.pub, big.priv, sum) != expected) {
      c.fail(fmt("homomorphism failed on sample %d", i));
      break;
    }
  }
  const KeyPair& tiny = tiny_key();
  for (int m = 0; m < 143; ++m) {
    for (int rep = 0; rep < 4; ++rep) {
      if (decrypt(tiny.pub, tiny.priv, encrypt(tiny.pub, m, rng)) != m) c.fail(fmt("round trip failed at m=%d", m));
    }
  }
  std::set<BigInt> seen;
  for (int i = 0; i < 1000; ++i) seen.insert(encrypt(big.pub, 42, rng).value);
  if (seen.size() != 1000) c.fail(fmt("only %zu distinct encryptions of one plaintext", seen.size()));
  if (c.ok) c.detail = "1000 homomorphic sums at 512 bits, all m in [0,143) round trip, 1000/1000 distinct";
  return c;
}

Check raw_leak() {
  SessionConfig cfg = session(8);
  cfg.leak_mode = LeakMode::raw;
  cfg.randomize_set_order = false;
  const KeyPair& keys = key64();
  DeterministicRandom rng(801);
  std::size_t mismatches = 0;
  std::size_t zero_only_in_y = 0;
  std::size_t pairs = 0;
  for (std::uint64_t x = 1; x <= 255; ++x) {
    const EncryptionTable table = build_table(keys.pub, {x, 8}, rng);
    for (std::uint64_t y = 1; y <= 255; ++y) {
      const BobMessages msgs = bob_messages(keys.pub, table, {y, 8}, cfg, rng);
      ++pairs;
      if (zeros(keys, msgs.at) > 0 && zeros(keys, msgs.below) == 0) ++zero_only_in_y;
      try {
        if (alice_decide(keys, msgs.below, msgs.at, cfg, SetOrder::below_first) != sign_of(x, y)) ++mismatches;
      } catch (const Error&) {
        ++mismatches;
      }
    }
  }
  return {mismatches == 0 && zero_only_in_y == 0,
          fmt("%zu pairs, outcome = sign(x-y) with %zu mismatches, zero only in y-set %zu times", pairs, mismatches,
              zero_only_in_y)};
}

Check wire_conformance() {
  Check c;
  std::set<MessageKind> kinds;
  for (const auto& golden : equilink::testing::golden_frames()) {
    const auto fixture = equilink::testing::read_fixture(golden.name);
    if (fixture.empty()) {
      c.fail("missing fixture " + golden.name);
      continue;
    }
    if (encode_frame(golden.message) != fixture) c.fail("encoding differs from fixture " + golden.name);
    if (decode_frame(fixture) != golden.message) c.fail("fixture " + golden.name + " decodes differently");
    kinds.insert(golden.message.kind);
  }
  if (kinds.size() != kMessageKindCount) c.fail("golden frames do not cover every kind");
  DeterministicRandom rng(901);
  for (int i = 0; i < 1000; ++i) {
    const WireMessage msg = equilink::testing::random_message(rng);
    if (decode_frame(encode_frame(msg)) != msg) {
      c.fail(fmt("round trip %d failed", i));
      break;
    }
  }
  if (c.ok) c.detail = fmt("%zu golden frames replayed, 1000 round trips", kinds.size());
  return c;
}

struct Criterion {
  int number;
  const char* name;
  std::function<Check()> run;
};

}  // namespace

int main(int argc, char** argv) {
  const std::vector<Criterion> criteria = {
      {1, "exhaustive equality, w=8", exhaustive_equality},
      {2, "exhaustive greater-than, w=8", exhaustive_greater_than},
      {3, "four-round oracle agreement, w=16", four_round_agreement},
      {4, "worked-example golden trace, w=3", golden_trace},
      {5, "message and work budgets", budgets},
      {6, "scaled record linkage 1000+1000/600", scaled_linkage},
      {7, "Paillier properties", paillier_properties},
      {8, "raw-mode leak characterization", raw_leak},
      {9, "wire conformance", wire_conformance},
  };
  std::set<int> selected;
  for (int i = 1; i < argc; ++i) selected.insert(std::atoi(argv[i]));

  int failures = 0;
  for (const auto& criterion : criteria) {
    if (!selected.empty() && !selected.contains(criterion.number)) continue;
    const auto start = std::chrono::steady_clock::now();
    Check result;
    try {
      result = criterion.run();
    } catch (const std::exception& e) {
      result = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    failures += !result.ok;
    std::printf("%s  [%d] %s: %s (%.1f s)\n", result.ok ? "PASS" : "FAIL", criterion.number, criterion.name,
                result.detail.c_str(), secs);
    std::fflush(stdout);
  }
  return failures == 0 ? EXIT_SUCCESS : EXIT_FAILURE;
}
