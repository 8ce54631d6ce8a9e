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

#include "equilink/transport.hpp"

#include <arpa/inet.h>
#include <fcntl.h>
#include <netdb.h>
#include <netinet/in.h>
#include <netinet/tcp.h>
#include <poll.h>
#include <sys/socket.h>
#include <unistd.h>

#include <cerrno>
#include <condition_variable>
#include <cstring>
#include <deque>
#include <map>
#include <mutex>
#include <set>
#include <thread>

#include "equilink/error.hpp"

namespace equilink {
namespace {

using Clock = std::chrono::steady_clock;
using std::chrono::milliseconds;

constexpr std::array<std::string_view, kMessageKindCount> kKindNames = {"HELLO",  "TABLE",   "PRODUCTS",
                                                                         "RESULT", "ADVANCE", "ABORT"};

std::size_t kind_index(MessageKind kind) { return static_cast<std::size_t>(kind); }

void require_kind(const WireMessage& msg, MessageKind kind) {
  if (msg.kind != kind) {
    raise(Errc::protocol, "expected " + std::string(to_string(kind)) + ", got " + std::string(to_string(msg.kind)));
  }
}

const nlohmann::json& member(const nlohmann::json& body, const char* name) {
  if (!body.is_object() || !body.contains(name)) raise(Errc::framing, std::string("message body missing '") + name + "'");
  return body.at(name);
}

BigInt hex_member(const nlohmann::json& body, const char* name) {
  const auto& v = member(body, name);
  if (!v.is_string()) raise(Errc::framing, std::string("'") + name + "' must be a hex string");
  auto parsed = from_hex(v.get<std::string>());
  if (!parsed) raise(Errc::framing, std::string("'") + name + "' is not lowercase hex");
  return *parsed;
}

std::uint64_t uint_member(const nlohmann::json& body, const char* name) {
  const auto& v = member(body, name);
  if (!v.is_number_unsigned()) raise(Errc::framing, std::string("'") + name + "' must be a non-negative integer");
  return v.get<std::uint64_t>();
}

nlohmann::json hex_array(const std::vector<Ciphertext>& cts) {
  auto out = nlohmann::json::array();
  for (const auto& c : cts) out.push_back(to_hex(c.value));
  return out;
}

std::vector<Ciphertext> ciphertext_array(const nlohmann::json& body, const char* name, const PublicKey& pk) {
  const auto& arr = member(body, name);
  if (!arr.is_array()) raise(Errc::framing, std::string("'") + name + "' must be an array");
  std::vector<Ciphertext> out;
  out.reserve(arr.size());
  for (const auto& v : arr) {
    if (!v.is_string()) raise(Errc::framing, std::string("'") + name + "' entries must be hex strings");
    auto parsed = from_hex(v.get<std::string>());
    if (!parsed) raise(Errc::framing, std::string("'") + name + "' entry is not lowercase hex");
    Ciphertext c{std::move(*parsed)};
    pk.check(c);
    out.push_back(std::move(c));
  }
  return out;
}

// ---------------------------------------------------------------------------
// In-memory pipes

struct Pipe {
  std::mutex mutex;
  std::condition_variable cv;
  std::deque<std::uint8_t> bytes;
  bool closed = false;
};

class MemoryStream final : public ByteStream {
 public:
  MemoryStream(std::shared_ptr<Pipe> in, std::shared_ptr<Pipe> out) : in_(std::move(in)), out_(std::move(out)) {}
  ~MemoryStream() override { close(); }

  void write_all(std::span<const std::uint8_t> bytes) override {
    std::lock_guard lock(out_->mutex);
    if (out_->closed) raise(Errc::transport, "connection closed");
    out_->bytes.insert(out_->bytes.end(), bytes.begin(), bytes.end());
    out_->cv.notify_all();
  }

  std::size_t read_exact(std::span<std::uint8_t> out, milliseconds timeout) override {
    std::unique_lock lock(in_->mutex);
    const bool ready = in_->cv.wait_for(lock, timeout, [&] { return in_->bytes.size() >= out.size() || in_->closed; });
    if (!ready) raise(Errc::transport, "timed out waiting for peer");
    const std::size_t n = std::min(out.size(), in_->bytes.size());
    std::copy_n(in_->bytes.begin(), n, out.begin());
    in_->bytes.erase(in_->bytes.begin(), in_->bytes.begin() + static_cast<std::ptrdiff_t>(n));
    return n;
  }

  void close() override {
    for (auto* pipe : {in_.get(), out_.get()}) {
      std::lock_guard lock(pipe->mutex);
      pipe->closed = true;
      pipe->cv.notify_all();
    }
  }

 private:
  std::shared_ptr<Pipe> in_;
  std::shared_ptr<Pipe> out_;
};

std::pair<std::unique_ptr<ByteStream>, std::unique_ptr<ByteStream>> memory_stream_pair() {
  auto ab = std::make_shared<Pipe>();
  auto ba = std::make_shared<Pipe>();
  return {std::make_unique<MemoryStream>(ba, ab), std::make_unique<MemoryStream>(ab, ba)};
}

struct MemoryRegistry {
  std::mutex mutex;
  std::condition_variable cv;
  std::set<std::string> listening;
  std::map<std::string, std::deque<std::unique_ptr<ByteStream>>> pending;

  static MemoryRegistry& instance() {
    static MemoryRegistry registry;
    return registry;
  }
};

constexpr std::string_view kMemPrefix = "mem:";

bool is_mem_endpoint(std::string_view endpoint) { return endpoint.substr(0, kMemPrefix.size()) == kMemPrefix; }

// ---------------------------------------------------------------------------
// TCP

class TcpStream final : public ByteStream {
 public:
  explicit TcpStream(int fd) : fd_(fd) {
    int one = 1;
    ::setsockopt(fd_, IPPROTO_TCP, TCP_NODELAY, &one, sizeof(one));
  }
  ~TcpStream() override { close(); }

  void write_all(std::span<const std::uint8_t> bytes) override {
    std::size_t sent = 0;
    while (sent < bytes.size()) {
      const ssize_t rc = ::send(fd_, bytes.data() + sent, bytes.size() - sent, MSG_NOSIGNAL);
      if (rc < 0) {
        if (errno == EINTR) continue;
        raise(Errc::transport, std::string("send failed: ") + std::strerror(errno));
      }
      sent += static_cast<std::size_t>(rc);
    }
  }

  std::size_t read_exact(std::span<std::uint8_t> out, milliseconds timeout) override {
    const auto deadline = Clock::now() + timeout;
    std::size_t got = 0;
    while (got < out.size()) {
      const auto left = std::chrono::duration_cast<milliseconds>(deadline - Clock::now()).count();
      if (left <= 0) raise(Errc::transport, "timed out waiting for peer");
      pollfd pfd{fd_, POLLIN, 0};
      const int ready = ::poll(&pfd, 1, static_cast<int>(left));
      if (ready < 0) {
        if (errno == EINTR) continue;
        raise(Errc::transport, std::string("poll failed: ") + std::strerror(errno));
      }
      if (ready == 0) continue;
      const ssize_t rc = ::recv(fd_, out.data() + got, out.size() - got, 0);
      if (rc < 0) {
        if (errno == EINTR) continue;
        raise(Errc::transport, std::string("recv failed: ") + std::strerror(errno));
      }
      if (rc == 0) break;
      got += static_cast<std::size_t>(rc);
    }
    return got;
  }

  void close() override {
    if (fd_ >= 0) {
      ::shutdown(fd_, SHUT_RDWR);
      ::close(fd_);
      fd_ = -1;
    }
  }

 private:
  int fd_;
};

std::pair<std::string, std::string> split_host_port(const std::string& endpoint) {
  const auto colon = endpoint.rfind(':');
  if (colon == std::string::npos || colon == 0 || colon + 1 == endpoint.size()) {
    raise(Errc::config, "endpoint must be host:port or mem:<name>, got '" + endpoint + "'");
  }
  return {endpoint.substr(0, colon), endpoint.substr(colon + 1)};
}

struct AddrInfo {
  addrinfo* head = nullptr;
  ~AddrInfo() {
    if (head) ::freeaddrinfo(head);
  }
};

void resolve(const std::string& endpoint, bool passive, AddrInfo& out) {
  const auto [host, port] = split_host_port(endpoint);
  addrinfo hints{};
  hints.ai_family = AF_UNSPEC;
  hints.ai_socktype = SOCK_STREAM;
  if (passive) hints.ai_flags = AI_PASSIVE;
  const int rc = ::getaddrinfo(host.c_str(), port.c_str(), &hints, &out.head);
  if (rc != 0) raise(Errc::config, "cannot resolve '" + endpoint + "': " + ::gai_strerror(rc));
}

}  // namespace

std::string_view to_string(MessageKind kind) { return kKindNames.at(kind_index(kind)); }

std::optional<MessageKind> message_kind_from_string(std::string_view name) {
  for (std::size_t i = 0; i < kKindNames.size(); ++i) {
    if (kKindNames[i] == name) return static_cast<MessageKind>(i);
  }
  return std::nullopt;
}

std::string_view to_string(AdvanceAction action) {
  switch (action) {
    case AdvanceAction::advance_alice: return "advance_alice";
    case AdvanceAction::advance_bob: return "advance_bob";
    case AdvanceAction::matched: return "matched";
  }
  return "?";
}

std::vector<std::uint8_t> encode_frame(const WireMessage& msg) {
  const nlohmann::json envelope = {{"kind", to_string(msg.kind)}, {"body", msg.body}};
  const std::string payload = envelope.dump();
  if (payload.size() > kMaxFrameBytes) raise(Errc::framing, "frame exceeds 64 MiB");
  std::vector<std::uint8_t> frame(4 + payload.size());
  const auto len = static_cast<std::uint32_t>(payload.size());
  frame[0] = static_cast<std::uint8_t>(len >> 24);
  frame[1] = static_cast<std::uint8_t>(len >> 16);
  frame[2] = static_cast<std::uint8_t>(len >> 8);
  frame[3] = static_cast<std::uint8_t>(len);
  std::memcpy(frame.data() + 4, payload.data(), payload.size());
  return frame;
}

WireMessage decode_payload(std::string_view payload) {
  nlohmann::json envelope;
  try {
    envelope = nlohmann::json::parse(payload);
  } catch (const nlohmann::json::exception& e) {
    raise(Errc::framing, std::string("malformed JSON payload: ") + e.what());
  }
  if (!envelope.is_object() || !envelope.contains("kind") || !envelope["kind"].is_string() ||
      !envelope.contains("body")) {
    raise(Errc::framing, "payload must be {\"kind\": ..., \"body\": ...}");
  }
  const auto kind = message_kind_from_string(envelope["kind"].get<std::string>());
  if (!kind) raise(Errc::framing, "unknown message kind '" + envelope["kind"].get<std::string>() + "'");
  return WireMessage{*kind, std::move(envelope["body"])};
}

WireMessage decode_frame(std::span<const std::uint8_t> frame) {
  if (frame.size() < 4) raise(Errc::framing, "truncated frame header");
  const std::size_t len = (std::size_t{frame[0]} << 24) | (std::size_t{frame[1]} << 16) |
                          (std::size_t{frame[2]} << 8) | std::size_t{frame[3]};
  if (len > kMaxFrameBytes) raise(Errc::framing, "frame exceeds 64 MiB");
  if (frame.size() < 4 + len) raise(Errc::framing, "truncated frame");
  if (frame.size() > 4 + len) raise(Errc::framing, "trailing bytes after frame");
  return decode_payload(std::string_view(reinterpret_cast<const char*>(frame.data() + 4), len));
}

WireMessage make_hello(const Hello& hello) {
  nlohmann::json body = {{"width", hello.width},
                         {"pad_to", hello.pad_to},
                         {"protocol_version", hello.protocol_version},
                         {"n", to_hex(hello.n)},
                         {"g", to_hex(hello.g)}};
  if (hello.count) body["count"] = *hello.count;
  return {MessageKind::hello, std::move(body)};
}

Hello parse_hello(const WireMessage& msg) {
  require_kind(msg, MessageKind::hello);
  Hello h;
  h.width = static_cast<unsigned>(uint_member(msg.body, "width"));
  h.pad_to = static_cast<unsigned>(uint_member(msg.body, "pad_to"));
  const auto& version = member(msg.body, "protocol_version");
  if (!version.is_number_integer()) raise(Errc::framing, "'protocol_version' must be an integer");
  h.protocol_version = version.get<int>();
  h.n = hex_member(msg.body, "n");
  h.g = hex_member(msg.body, "g");
  if (msg.body.contains("count")) h.count = uint_member(msg.body, "count");
  return h;
}

WireMessage make_table(const EncryptionTable& table) { return {MessageKind::table, table_to_json(table)}; }

EncryptionTable parse_table(const WireMessage& msg, const PublicKey& pk) {
  require_kind(msg, MessageKind::table);
  return table_from_json(msg.body, pk);
}

WireMessage make_products(const Products& products) {
  return {MessageKind::products, {{"set_a", hex_array(products.set_a)}, {"set_b", hex_array(products.set_b)}}};
}

Products parse_products(const WireMessage& msg, const PublicKey& pk) {
  require_kind(msg, MessageKind::products);
  return {ciphertext_array(msg.body, "set_a", pk), ciphertext_array(msg.body, "set_b", pk)};
}

WireMessage make_result(bool equal) { return {MessageKind::result, {{"equal", equal}}}; }

bool parse_result(const WireMessage& msg) {
  require_kind(msg, MessageKind::result);
  const auto& v = member(msg.body, "equal");
  if (!v.is_boolean()) raise(Errc::framing, "'equal' must be a boolean");
  return v.get<bool>();
}

WireMessage make_advance(const Advance& advance) {
  nlohmann::json body = {{"action", to_string(advance.action)}};
  if (advance.ids) body["ids"] = *advance.ids;
  return {MessageKind::advance, std::move(body)};
}

Advance parse_advance(const WireMessage& msg) {
  require_kind(msg, MessageKind::advance);
  const auto& action = member(msg.body, "action");
  if (!action.is_string()) raise(Errc::framing, "'action' must be a string");
  Advance out;
  const auto name = action.get<std::string>();
  if (name == "advance_alice") {
    out.action = AdvanceAction::advance_alice;
  } else if (name == "advance_bob") {
    out.action = AdvanceAction::advance_bob;
  } else if (name == "matched") {
    out.action = AdvanceAction::matched;
  } else {
    raise(Errc::framing, "unknown advance action '" + name + "'");
  }
  if (msg.body.contains("ids")) {
    const auto& ids = msg.body["ids"];
    if (!ids.is_array()) raise(Errc::framing, "'ids' must be an array");
    std::vector<std::int64_t> values;
    for (const auto& v : ids) {
      if (!v.is_number_integer()) raise(Errc::framing, "'ids' entries must be integers");
      values.push_back(v.get<std::int64_t>());
    }
    out.ids = std::move(values);
  }
  return out;
}

WireMessage make_abort(std::string_view reason) { return {MessageKind::abort, {{"reason", reason}}}; }

std::string parse_abort(const WireMessage& msg) {
  require_kind(msg, MessageKind::abort);
  const auto& v = member(msg.body, "reason");
  if (!v.is_string()) raise(Errc::framing, "'reason' must be a string");
  return v.get<std::string>();
}

// ---------------------------------------------------------------------------
// Channel

Channel::Channel(std::unique_ptr<ByteStream> stream, milliseconds timeout)
    : stream_(std::move(stream)), timeout_(timeout) {}

Channel::~Channel() { close(); }

void Channel::send(const WireMessage& msg) {
  if (!stream_) raise(Errc::transport, "channel is closed");
  const auto frame = encode_frame(msg);
  stream_->write_all(frame);
  ++stats_.frames_sent;
  stats_.bytes_sent += frame.size();
  ++stats_.sent_by_kind[kind_index(msg.kind)];
  if (tap_) tap_(Direction::outgoing, msg, frame);
}

WireMessage Channel::receive() {
  if (!stream_) raise(Errc::transport, "channel is closed");
  std::vector<std::uint8_t> frame(4);
  const std::size_t header = stream_->read_exact(frame, timeout_);
  if (header == 0) raise(Errc::transport, "connection closed by peer");
  try {
    if (header < 4) raise(Errc::framing, "truncated frame header");
    const std::size_t len = (std::size_t{frame[0]} << 24) | (std::size_t{frame[1]} << 16) |
                            (std::size_t{frame[2]} << 8) | std::size_t{frame[3]};
    if (len > kMaxFrameBytes) raise(Errc::framing, "frame exceeds 64 MiB");
    frame.resize(4 + len);
    const std::size_t got = stream_->read_exact(std::span(frame).subspan(4), timeout_);
    if (got < len) raise(Errc::framing, "truncated frame");
    WireMessage msg = decode_frame(frame);
    ++stats_.frames_received;
    stats_.bytes_received += frame.size();
    ++stats_.received_by_kind[kind_index(msg.kind)];
    if (tap_) tap_(Direction::incoming, msg, frame);
    if (msg.kind == MessageKind::abort) {
      std::string reason;
      try {
        reason = parse_abort(msg);
      } catch (const Error&) {
        reason = "unspecified";
      }
      close();
      raise(Errc::aborted, reason);
    }
    return msg;
  } catch (const Error& e) {
    if (e.code() == Errc::framing) abort("framing-error");
    throw;
  }
}

WireMessage Channel::expect(MessageKind kind) {
  WireMessage msg = receive();
  if (msg.kind != kind) {
    abort("unexpected-kind");
    raise(Errc::protocol, "expected " + std::string(to_string(kind)) + ", got " + std::string(to_string(msg.kind)));
  }
  return msg;
}

void Channel::abort(std::string_view reason) noexcept {
  try {
    if (stream_) send(make_abort(reason));
  } catch (...) {
  }
  close();
}

void Channel::close() noexcept {
  if (stream_) {
    try {
      stream_->close();
    } catch (...) {
    }
    stream_.reset();
  }
}

std::pair<Channel, Channel> loopback_pair(milliseconds timeout) {
  auto [a, b] = memory_stream_pair();
  return {Channel(std::move(a), timeout), Channel(std::move(b), timeout)};
}

// ---------------------------------------------------------------------------
// Endpoints

Listener::Listener(const std::string& endpoint) : endpoint_(endpoint) {
  if (is_mem_endpoint(endpoint)) {
    mem_name_ = endpoint.substr(kMemPrefix.size());
    auto& reg = MemoryRegistry::instance();
    std::lock_guard lock(reg.mutex);
    if (!reg.listening.insert(mem_name_).second) raise(Errc::config, "endpoint '" + endpoint + "' already in use");
    reg.cv.notify_all();
    return;
  }
  AddrInfo info;
  resolve(endpoint, true, info);
  for (addrinfo* ai = info.head; ai; ai = ai->ai_next) {
    const int fd = ::socket(ai->ai_family, ai->ai_socktype, ai->ai_protocol);
    if (fd < 0) continue;
    int one = 1;
    ::setsockopt(fd, SOL_SOCKET, SO_REUSEADDR, &one, sizeof(one));
    if (::bind(fd, ai->ai_addr, ai->ai_addrlen) == 0 && ::listen(fd, 8) == 0) {
      fd_ = fd;
      break;
    }
    ::close(fd);
  }
  if (fd_ < 0) raise(Errc::transport, "cannot listen on '" + endpoint + "': " + std::strerror(errno));

  sockaddr_storage addr{};
  socklen_t len = sizeof(addr);
  if (::getsockname(fd_, reinterpret_cast<sockaddr*>(&addr), &len) == 0) {
    const auto host = split_host_port(endpoint).first;
    unsigned port = 0;
    if (addr.ss_family == AF_INET) port = ntohs(reinterpret_cast<sockaddr_in*>(&addr)->sin_port);
    if (addr.ss_family == AF_INET6) port = ntohs(reinterpret_cast<sockaddr_in6*>(&addr)->sin6_port);
    endpoint_ = host + ":" + std::to_string(port);
  }
}

Listener::~Listener() {
  if (fd_ >= 0) ::close(fd_);
  if (!mem_name_.empty()) {
    auto& reg = MemoryRegistry::instance();
    std::lock_guard lock(reg.mutex);
    reg.listening.erase(mem_name_);
    reg.pending.erase(mem_name_);
  }
}

Channel Listener::accept(milliseconds timeout) {
  if (!mem_name_.empty()) {
    auto& reg = MemoryRegistry::instance();
    std::unique_lock lock(reg.mutex);
    auto& queue = reg.pending[mem_name_];
    if (!reg.cv.wait_for(lock, timeout, [&] { return !queue.empty(); })) {
      raise(Errc::transport, "timed out waiting for a connection on '" + endpoint_ + "'");
    }
    auto stream = std::move(queue.front());
    queue.pop_front();
    return Channel(std::move(stream));
  }
  pollfd pfd{fd_, POLLIN, 0};
  const int ready = ::poll(&pfd, 1, static_cast<int>(timeout.count()));
  if (ready <= 0) raise(Errc::transport, "timed out waiting for a connection on '" + endpoint_ + "'");
  const int fd = ::accept(fd_, nullptr, nullptr);
  if (fd < 0) raise(Errc::transport, std::string("accept failed: ") + std::strerror(errno));
  return Channel(std::make_unique<TcpStream>(fd));
}

Channel listen(const std::string& endpoint, milliseconds timeout) {
  Listener listener(endpoint);
  return listener.accept(timeout);
}

Channel dial(const std::string& endpoint, milliseconds timeout) {
  const auto deadline = Clock::now() + timeout;
  if (is_mem_endpoint(endpoint)) {
    const std::string name = endpoint.substr(kMemPrefix.size());
    auto& reg = MemoryRegistry::instance();
    std::unique_lock lock(reg.mutex);
    if (!reg.cv.wait_until(lock, deadline, [&] { return reg.listening.contains(name); })) {
      raise(Errc::transport, "nothing listening on '" + endpoint + "'");
    }
    auto [mine, theirs] = memory_stream_pair();
    reg.pending[name].push_back(std::move(theirs));
    reg.cv.notify_all();
    return Channel(std::move(mine));
  }
  for (;;) {
    AddrInfo info;
    resolve(endpoint, false, info);
    for (addrinfo* ai = info.head; ai; ai = ai->ai_next) {
      const int fd = ::socket(ai->ai_family, ai->ai_socktype, ai->ai_protocol);
      if (fd < 0) continue;
      if (::connect(fd, ai->ai_addr, ai->ai_addrlen) == 0) return Channel(std::make_unique<TcpStream>(fd));
      ::close(fd);
    }
    if (Clock::now() >= deadline) raise(Errc::transport, "cannot connect to '" + endpoint + "'");
    std::this_thread::sleep_for(milliseconds(50));
  }
}

// ---------------------------------------------------------------------------
// Handshake

namespace {

std::optional<std::string> mismatch(const Hello& mine, const Hello& theirs) {
  if (theirs.protocol_version != mine.protocol_version) return "version-mismatch";
  if (theirs.width != mine.width) return "width-mismatch";
  if (theirs.pad_to != mine.pad_to) return "pad-mismatch";
  if (theirs.n != 0 && (theirs.n < 3 || theirs.g != theirs.n + 1)) return "bad-key";
  return std::nullopt;
}

}  // namespace

Hello handshake_initiator(Channel& channel, const Hello& mine) {
  channel.send(make_hello(mine));
  const WireMessage reply = channel.expect(MessageKind::hello);
  Hello theirs;
  try {
    theirs = parse_hello(reply);
  } catch (const Error&) {
    channel.abort("framing-error");
    throw;
  }
  if (auto reason = mismatch(mine, theirs)) {
    channel.abort(*reason);
    raise(Errc::protocol, *reason);
  }
  return theirs;
}

Hello handshake_responder(Channel& channel, const Hello& mine) {
  const WireMessage first = channel.expect(MessageKind::hello);
  Hello theirs;
  try {
    theirs = parse_hello(first);
  } catch (const Error&) {
    channel.abort("framing-error");
    throw;
  }
  if (theirs.n == 0) {
    channel.abort("bad-key");
    raise(Errc::protocol, "bad-key");
  }
  if (auto reason = mismatch(mine, theirs)) {
    channel.abort(*reason);
    raise(Errc::protocol, *reason);
  }
  Hello reply = mine;
  if (reply.n == 0) {
    reply.n = theirs.n;
    reply.g = theirs.g;
  }
  channel.send(make_hello(reply));
  return theirs;
}

}  // namespace equilink
