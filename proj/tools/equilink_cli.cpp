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

// equilink command line: key management, synthetic data, single
// comparisons, two-party linkage and a loopback benchmark.

#include <chrono>
#include <cstdint>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "equilink/datagen.hpp"
#include "equilink/error.hpp"
#include "equilink/linkage.hpp"
#include "equilink/paillier.hpp"
#include "equilink/protocol.hpp"
#include "equilink/random.hpp"
#include "equilink/transport.hpp"

namespace fs = std::filesystem;
using namespace equilink;
using json = nlohmann::ordered_json;

namespace {

constexpr const char* kDefaultEndpoint = "127.0.0.1:7700";
constexpr const char* kMacKeyEnv = "EQUILINK_MAC_KEY";

struct SessionOptions {
  unsigned width = 0;
  unsigned pad_to = 0;
  std::string endpoint = kDefaultEndpoint;
  unsigned timeout_ms = 30'000;
};

void add_session_options(CLI::App* cmd, SessionOptions& o) {
  cmd->add_option("--pad-to", o.pad_to, "Messages per set (default: width)");
  cmd->add_option("--endpoint", o.endpoint, "host:port; Alice listens, Bob dials")->capture_default_str();
  cmd->add_option("--timeout-ms", o.timeout_ms, "Per-flight timeout")->capture_default_str();
}

std::chrono::milliseconds timeout(const SessionOptions& o) { return std::chrono::milliseconds(o.timeout_ms); }

Channel connect(const std::string& role, const SessionOptions& o) {
  return role == "alice" ? listen(o.endpoint, timeout(o)) : dial(o.endpoint, timeout(o));
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) raise(Errc::config, "cannot open '" + path.string() + "' for writing");
  out << text;
  if (!out) raise(Errc::config, "write to '" + path.string() + "' failed");
}

std::string read_text(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) raise(Errc::config, "cannot read '" + path.string() + "'");
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

/// Alice's key: the private key file if given, else a fresh one.
KeyPair alice_key(const std::string& key_file, std::size_t bits) {
  if (!key_file.empty()) return key_pair_from_json(load_json(key_file));
  return keygen(bits);
}

std::optional<PublicKey> bob_key(const std::string& key_file) {
  if (key_file.empty()) return std::nullopt;
  return public_key_from_json(load_json(key_file));
}

void require_same_key(Channel& channel, const std::optional<PublicKey>& expected, const BigInt& n) {
  if (expected && expected->modulus() != n) {
    channel.abort("bad-key");
    raise(Errc::protocol, "Alice's key does not match --key");
  }
}

std::vector<std::uint8_t> mac_key(const std::string& file) {
  std::string text;
  if (!file.empty()) {
    text = read_text(file);
  } else if (const char* env = std::getenv(kMacKeyEnv)) {
    text = env;
  }
  while (!text.empty() && (text.back() == '\n' || text.back() == '\r')) text.pop_back();
  if (text.empty()) {
    raise(Errc::config, std::string("keyed hashing needs --mac-key-file or ") + kMacKeyEnv +
                            "; --unsafe-raw links unhashed integers instead");
  }
  if (text.size() < kMinMacKeyBytes) raise(Errc::config, "MAC key must be at least 16 bytes");
  return {text.begin(), text.end()};
}

json phases(const SessionMetrics& m, double total) {
  return {{"table_build", m.table_build}, {"message_gen", m.message_gen}, {"decrypt_decide", m.decrypt_decide},
          {"total", total}};
}

json run_report(const LinkResult& r, std::size_t records, json config) {
  return {{"phases", phases(r.metrics, r.total_seconds)},
          {"counts",
           {{"records", records},
            {"comparisons", r.comparisons_used},
            {"matches", r.matches.size()},
            {"multiplications", r.metrics.combinations}}},
          {"collisions", {{"possible", r.collisions_possible}, {"expected", r.expected_collisions}}},
          {"config", std::move(config)}};
}

// ---------------------------------------------------------------------------

struct KeygenArgs {
  std::size_t bits = 2048;
  std::string out;
};

int run_keygen(const KeygenArgs& a) {
  const KeyPair keys = keygen(a.bits);
  save_json(a.out, key_pair_to_json(keys));
  save_json(a.out + ".pub", public_key_to_json(keys.pub));
  std::cout << json{{"private", a.out}, {"public", a.out + ".pub"}, {"bits", keys.pub.bits()}}.dump() << "\n";
  return 0;
}

struct GenDataArgs {
  std::size_t count_a = 1000;
  std::size_t count_b = 1000;
  std::size_t overlap = 600;
  std::uint64_t seed = 1;
  std::string out_a;
  std::string out_b;
};

int run_gen_data(const GenDataArgs& a) {
  const DatasetPair data = generate_pair(a.count_a, a.count_b, a.overlap, a.seed);
  write_jsonl(a.out_a, data.a);
  write_jsonl(a.out_b, data.b);
  std::cout << json{{"count_a", data.a.size()}, {"count_b", data.b.size()}, {"overlap", a.overlap}, {"seed", a.seed}}
                   .dump()
            << "\n";
  return 0;
}

struct CompareArgs {
  std::string role;
  std::uint64_t value = 0;
  std::string key;
  std::size_t key_bits = 2048;
  SessionOptions session;
};

int run_compare(CompareArgs& a) {
  SessionConfig cfg;
  cfg.width = a.session.width;
  cfg.pad_to = a.session.pad_to;
  cfg.leak_mode = LeakMode::raw;
  cfg.validate();
  const EncodedValue v = EncodedValue::make(a.value, cfg.width);
  if (v.value == 0) raise(Errc::domain, "--value must be at least 1");

  if (a.role == "alice") {
    const KeyPair keys = alice_key(a.key, a.key_bits);
    cfg.key_bits = keys.pub.bits();
    Channel ch = connect(a.role, a.session);
    handshake_initiator(ch, cfg.hello(&keys.pub));
    const ComparisonOutcome outcome = run_equality_alice(ch, keys, v, cfg, system_random());
    ch.close();
    std::cout << (outcome == ComparisonOutcome::equal ? "true" : "false") << "\n";
    std::cout << "outcome: " << to_string(outcome) << "\n";
    return 0;
  }
  const auto expected = bob_key(a.key);
  Channel ch = connect(a.role, a.session);
  const Hello theirs = handshake_responder(ch, cfg.hello(nullptr));
  require_same_key(ch, expected, theirs.n);
  const bool equal = run_equality_bob(ch, PublicKey(theirs.n), v, cfg, system_random());
  ch.close();
  std::cout << (equal ? "true" : "false") << "\n";
  return 0;
}

struct LinkArgs {
  std::string role;
  std::string input;
  std::string field = "ssn";
  std::string mac_key_file;
  std::string out = "matches.csv";
  std::string report;
  std::string key;
  std::size_t key_bits = 2048;
  bool unsafe_raw = false;
  SessionOptions session;
};

std::vector<HashedId> identifiers(const LinkArgs& a, const std::vector<Record>& records, unsigned width) {
  std::vector<std::string> fields;
  fields.reserve(records.size());
  for (const auto& r : records) fields.push_back(field_value(r, a.field));
  if (!a.unsafe_raw) return hash_identifiers(fields, mac_key(a.mac_key_file), width);

  if (!a.mac_key_file.empty()) raise(Errc::config, "--unsafe-raw and --mac-key-file are mutually exclusive");
  std::vector<std::uint64_t> values;
  values.reserve(fields.size());
  for (const auto& f : fields) {
    std::size_t used = 0;
    unsigned long long v = 0;
    try {
      v = std::stoull(f, &used, 10);
    } catch (const std::exception&) {
      used = 0;
    }
    if (f.empty() || used != f.size() || f.front() == '-') {
      raise(Errc::config, "--unsafe-raw needs integer field values, got '" + f + "'");
    }
    values.push_back(v);
  }
  return raw_identifiers(values, width);
}

int run_link(LinkArgs& a) {
  SessionConfig cfg;
  cfg.width = a.session.width;
  cfg.pad_to = a.session.pad_to;
  cfg.leak_mode = a.unsafe_raw ? LeakMode::raw : LeakMode::hashed;
  cfg.validate();

  const std::vector<Record> records = read_jsonl(a.input);
  const auto ids = identifiers(a, records, cfg.width);
  std::vector<std::int64_t> record_ids;
  record_ids.reserve(records.size());
  for (const auto& r : records) record_ids.push_back(r.id);

  LinkResult result;
  if (a.role == "alice") {
    const KeyPair keys = alice_key(a.key, a.key_bits);
    cfg.key_bits = keys.pub.bits();
    Channel ch = connect(a.role, a.session);
    result = link_as_alice(ch, keys, ids, record_ids, cfg, system_random());
  } else {
    const auto expected = bob_key(a.key);
    Channel ch = connect(a.role, a.session);
    result = link_as_bob(ch, ids, record_ids, cfg, system_random());
    if (expected) cfg.key_bits = expected->bits();
  }

  std::string csv = "alice_id,bob_id\n";
  for (const auto& [x, y] : result.matches) csv += std::to_string(x) + "," + std::to_string(y) + "\n";
  write_text(a.out, csv);

  const json report = run_report(result, records.size(),
                                 {{"role", a.role},
                                  {"field", a.field},
                                  {"width", cfg.width},
                                  {"pad_to", cfg.padded()},
                                  {"hashed", !a.unsafe_raw},
                                  {"distinct_identifiers", ids.size()}});
  if (!a.report.empty()) write_text(a.report, report.dump(2) + "\n");
  std::cout << json{{"matches", result.matches.size()}, {"comparisons", result.comparisons_used}, {"out", a.out}}
                   .dump()
            << "\n";
  return 0;
}

struct BenchArgs {
  std::size_t records = 1000;
  std::optional<std::size_t> overlap;
  std::size_t bits = 2048;
  unsigned width = kDefaultLinkWidth;
  std::uint64_t seed = 1;
  std::string out;
};

int run_bench(const BenchArgs& a) {
  const std::size_t overlap = a.overlap.value_or(a.records * 6 / 10);
  SessionConfig cfg;
  cfg.width = a.width;
  cfg.key_bits = a.bits;
  cfg.validate();

  const auto t0 = std::chrono::steady_clock::now();
  const KeyPair keys = keygen(a.bits);
  const double keygen_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  const DatasetPair data = generate_pair(a.records, a.records, overlap, a.seed);
  std::vector<std::uint8_t> mac(32);
  system_random().fill(mac);

  std::vector<std::string> ssn_a, ssn_b;
  for (const auto& r : data.a) ssn_a.push_back(r.ssn);
  for (const auto& r : data.b) ssn_b.push_back(r.ssn);
  const auto ids_a = hash_identifiers(ssn_a, mac, cfg.width);
  const auto ids_b = hash_identifiers(ssn_b, mac, cfg.width);
  const LinkResult r = sorted_merge_link(ids_a, ids_b, cfg, keys);

  json report = run_report(r, a.records,
                           {{"records_per_side", a.records},
                            {"overlap", overlap},
                            {"key_bits", keys.pub.bits()},
                            {"width", cfg.width},
                            {"pad_to", cfg.padded()},
                            {"seed", a.seed},
                            {"threads", std::thread::hardware_concurrency()}});
  report["counts"]["expected_matches"] = overlap;
  report["keygen_seconds"] = keygen_seconds;
  const std::string text = report.dump(2) + "\n";
  if (a.out.empty()) {
    std::cout << text;
  } else {
    write_text(a.out, text);
  }
  return 0;
}

int fail(const std::string& kind, const std::string& message, int code) {
  std::cerr << json{{"error", kind}, {"message", message}}.dump() << "\n";
  return code;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Private equality testing and record linkage over Paillier encryption"};
  app.require_subcommand(1);
  const std::vector<std::string> roles = {"alice", "bob"};

  KeygenArgs keygen_args;
  auto* keygen_cmd = app.add_subcommand("keygen", "Generate a Paillier key pair");
  keygen_cmd->add_option("--bits", keygen_args.bits, "Modulus size")->capture_default_str();
  keygen_cmd->add_option("--out", keygen_args.out, "Private key file; the public key goes to <out>.pub")->required();

  GenDataArgs gen_args;
  auto* gen_cmd = app.add_subcommand("gen-data", "Generate two overlapping synthetic datasets");
  gen_cmd->add_option("--count-a", gen_args.count_a)->capture_default_str();
  gen_cmd->add_option("--count-b", gen_args.count_b)->capture_default_str();
  gen_cmd->add_option("--overlap", gen_args.overlap)->capture_default_str();
  gen_cmd->add_option("--seed", gen_args.seed)->capture_default_str();
  gen_cmd->add_option("--out-a", gen_args.out_a)->required();
  gen_cmd->add_option("--out-b", gen_args.out_b)->required();

  CompareArgs compare_args;
  compare_args.session.width = kDefaultWidth;
  auto* compare_cmd = app.add_subcommand("compare", "Test one value for equality with a peer");
  compare_cmd->add_option("--role", compare_args.role)->required()->check(CLI::IsMember(roles));
  compare_cmd->add_option("--value", compare_args.value)->required();
  compare_cmd->add_option("--width", compare_args.session.width, "Bit width")->capture_default_str();
  compare_cmd->add_option("--key", compare_args.key, "Alice: private key file; Bob: expected public key file");
  compare_cmd->add_option("--key-bits", compare_args.key_bits, "Fresh key size when Alice has no --key")
      ->capture_default_str();
  add_session_options(compare_cmd, compare_args.session);

  LinkArgs link_args;
  link_args.session.width = kDefaultLinkWidth;
  auto* link_cmd = app.add_subcommand("link", "Link a record file against a peer's");
  link_cmd->add_option("--role", link_args.role)->required()->check(CLI::IsMember(roles));
  link_cmd->add_option("--input", link_args.input, "JSONL records")->required()->check(CLI::ExistingFile);
  link_cmd->add_option("--field", link_args.field, "Identifier field")->capture_default_str();
  link_cmd->add_option("--mac-key-file", link_args.mac_key_file,
                       std::string("Shared hashing key; falls back to $") + kMacKeyEnv);
  link_cmd->add_option("--width", link_args.session.width, "Hash width in bits")->capture_default_str();
  link_cmd->add_option("--out", link_args.out, "Matches CSV")->capture_default_str();
  link_cmd->add_option("--report", link_args.report, "Run report JSON");
  link_cmd->add_option("--key", link_args.key, "Alice: private key file; Bob: expected public key file");
  link_cmd->add_option("--key-bits", link_args.key_bits, "Fresh key size when Alice has no --key")
      ->capture_default_str();
  link_cmd->add_flag("--unsafe-raw", link_args.unsafe_raw,
                     "Compare unhashed integer fields; reveals the order of every compared pair");
  add_session_options(link_cmd, link_args.session);

  BenchArgs bench_args;
  auto* bench_cmd = app.add_subcommand("bench", "Loopback linkage run with phase timings");
  bench_cmd->add_option("--records", bench_args.records, "Records per side")->capture_default_str();
  bench_cmd->add_option("--overlap", bench_args.overlap, "Shared records (default: 60%)");
  bench_cmd->add_option("--bits", bench_args.bits, "Key size")->capture_default_str();
  bench_cmd->add_option("--width", bench_args.width, "Hash width")->capture_default_str();
  bench_cmd->add_option("--seed", bench_args.seed)->capture_default_str();
  bench_cmd->add_option("--out", bench_args.out, "Report file (default: stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    return fail("usage", e.what(), 1);
  }

  try {
    if (*keygen_cmd) return run_keygen(keygen_args);
    if (*gen_cmd) return run_gen_data(gen_args);
    if (*compare_cmd) return run_compare(compare_args);
    if (*link_cmd) return run_link(link_args);
    if (*bench_cmd) return run_bench(bench_args);
  } catch (const Error& e) {
    return fail(std::string(to_string(e.code())), e.what(), 2);
  } catch (const std::exception& e) {
    return fail("internal", e.what(), 3);
  }
  return 1;
}
