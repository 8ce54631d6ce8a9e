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

// Length-prefixed JSON frames over a byte stream, plus TCP and in-memory
// endpoints.
//
// Frame layout: 4-byte big-endian payload length, then a UTF-8 JSON payload
// {"kind": "<KIND>", "body": <kind-specific value>}. Big integers inside
// bodies are lowercase hex without prefix.

#include <array>
#include <chrono>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "equilink/encoding.hpp"
#include "equilink/paillier.hpp"

namespace equilink {

inline constexpr std::size_t kMaxFrameBytes = std::size_t{64} << 20;
inline constexpr int kProtocolVersion = 1;
inline constexpr std::chrono::milliseconds kDefaultFlightTimeout{30'000};

enum class MessageKind : std::uint8_t { hello, table, products, result, advance, abort };
inline constexpr std::size_t kMessageKindCount = 6;

std::string_view to_string(MessageKind kind);
std::optional<MessageKind> message_kind_from_string(std::string_view name);

struct WireMessage {
  MessageKind kind = MessageKind::hello;
  nlohmann::json body;

  friend bool operator==(const WireMessage&, const WireMessage&) = default;
};

std::vector<std::uint8_t> encode_frame(const WireMessage& msg);
/// Decodes exactly one complete frame. Throws Errc::framing on a short or
/// oversize buffer, trailing bytes, malformed JSON or an unknown kind.
WireMessage decode_frame(std::span<const std::uint8_t> frame);
WireMessage decode_payload(std::string_view payload);

// Typed bodies.

struct Hello {
  unsigned width = 0;
  unsigned pad_to = 0;
  int protocol_version = kProtocolVersion;
  BigInt n;
  BigInt g;
  /// Distinct identifier count, sent only by linkage sessions.
  std::optional<std::uint64_t> count;

  friend bool operator==(const Hello&, const Hello&) = default;
};

struct Products {
  std::vector<Ciphertext> set_a;
  std::vector<Ciphertext> set_b;
};

enum class AdvanceAction { advance_alice, advance_bob, matched };

struct Advance {
  AdvanceAction action = AdvanceAction::matched;
  /// Record ids on the sender's side; present only on `matched`.
  std::optional<std::vector<std::int64_t>> ids;

  friend bool operator==(const Advance&, const Advance&) = default;
};

std::string_view to_string(AdvanceAction action);

WireMessage make_hello(const Hello& hello);
WireMessage make_table(const EncryptionTable& table);
WireMessage make_products(const Products& products);
WireMessage make_result(bool equal);
WireMessage make_advance(const Advance& advance);
WireMessage make_abort(std::string_view reason);

// Parsers throw Errc::framing on shape errors and Errc::protocol on a kind
// mismatch. Ciphertexts are range-checked against `pk`.
Hello parse_hello(const WireMessage& msg);
EncryptionTable parse_table(const WireMessage& msg, const PublicKey& pk);
Products parse_products(const WireMessage& msg, const PublicKey& pk);
bool parse_result(const WireMessage& msg);
Advance parse_advance(const WireMessage& msg);
std::string parse_abort(const WireMessage& msg);

/// Reliable, ordered byte pipe.
class ByteStream {
 public:
  virtual ~ByteStream() = default;
  virtual void write_all(std::span<const std::uint8_t> bytes) = 0;
  /// Blocks until `out` is full, the peer closes, or the timeout expires
  /// (Errc::transport). Returns the byte count read; short only at EOF.
  virtual std::size_t read_exact(std::span<std::uint8_t> out, std::chrono::milliseconds timeout) = 0;
  virtual void close() = 0;
};

struct ChannelStats {
  std::size_t frames_sent = 0;
  std::size_t frames_received = 0;
  std::size_t bytes_sent = 0;
  std::size_t bytes_received = 0;
  std::array<std::size_t, kMessageKindCount> sent_by_kind{};
  std::array<std::size_t, kMessageKindCount> received_by_kind{};
};

enum class Direction { outgoing, incoming };

/// One endpoint of a session. Not shared between threads.
class Channel {
 public:
  using Tap = std::function<void(Direction, const WireMessage&, std::span<const std::uint8_t> frame)>;

  explicit Channel(std::unique_ptr<ByteStream> stream, std::chrono::milliseconds timeout = kDefaultFlightTimeout);
  Channel(Channel&&) noexcept = default;
  Channel& operator=(Channel&&) noexcept = default;
  ~Channel();

  void send(const WireMessage& msg);
  /// Next frame. An ABORT from the peer is raised as Errc::aborted.
  WireMessage receive();
  /// receive() that insists on `kind`; anything else aborts the session.
  WireMessage expect(MessageKind kind);
  /// Best-effort ABORT to the peer, then close. Never throws.
  void abort(std::string_view reason) noexcept;
  void close() noexcept;

  void set_timeout(std::chrono::milliseconds timeout) { timeout_ = timeout; }
  void set_tap(Tap tap) { tap_ = std::move(tap); }
  const ChannelStats& stats() const noexcept { return stats_; }

 private:
  std::unique_ptr<ByteStream> stream_;
  std::chrono::milliseconds timeout_;
  ChannelStats stats_;
  Tap tap_;
};

/// Two connected in-memory channels.
std::pair<Channel, Channel> loopback_pair(std::chrono::milliseconds timeout = kDefaultFlightTimeout);

/// Accepts connections on "host:port" (port 0 picks a free one) or on an
/// in-process "mem:<name>" endpoint.
class Listener {
 public:
  explicit Listener(const std::string& endpoint);
  Listener(const Listener&) = delete;
  Listener& operator=(const Listener&) = delete;
  ~Listener();

  Channel accept(std::chrono::milliseconds timeout = kDefaultFlightTimeout);
  /// The bound endpoint, with the real port when 0 was requested.
  const std::string& endpoint() const noexcept { return endpoint_; }

 private:
  std::string endpoint_;
  int fd_ = -1;
  std::string mem_name_;
};

Channel listen(const std::string& endpoint, std::chrono::milliseconds timeout = kDefaultFlightTimeout);
/// Retries until the peer is listening or the timeout expires.
Channel dial(const std::string& endpoint, std::chrono::milliseconds timeout = kDefaultFlightTimeout);

/// Parameter negotiation. The initiator (the key holder) sends its HELLO
/// first; the responder checks width, pad_to and version, answering with
/// ABORT("width-mismatch" | "pad-mismatch" | "version-mismatch" | "bad-key")
/// on disagreement, otherwise with its own HELLO. A responder without a key
/// of its own (n == 0) echoes the initiator's key. Both return the peer's HELLO.
Hello handshake_initiator(Channel& channel, const Hello& mine);
Hello handshake_responder(Channel& channel, const Hello& mine);

}  // namespace equilink
