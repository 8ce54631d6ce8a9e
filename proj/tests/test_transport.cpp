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

#include <arpa/inet.h>
#include <netinet/in.h>
#include <sys/socket.h>
#include <unistd.h>

#include <string>
#include <thread>

#include <gtest/gtest.h>

#include "equilink/error.hpp"
#include "equilink/transport.hpp"
#include "golden.hpp"
#include "test_support.hpp"

using namespace equilink;
using namespace std::chrono_literals;
using equilink::testing::key64;
using equilink::testing::random_message;

namespace {

Errc code_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "expected an equilink::Error";
  return Errc::domain;
}

std::vector<std::uint8_t> bytes_of(std::string_view payload) {
  std::vector<std::uint8_t> out = {0, 0, 0, 0};
  const auto len = static_cast<std::uint32_t>(payload.size());
  out[0] = static_cast<std::uint8_t>(len >> 24);
  out[1] = static_cast<std::uint8_t>(len >> 16);
  out[2] = static_cast<std::uint8_t>(len >> 8);
  out[3] = static_cast<std::uint8_t>(len);
  out.insert(out.end(), payload.begin(), payload.end());
  return out;
}

}  // namespace

TEST(Frame, GoldenFramesMatchFixturesByteForByte) {
  for (const auto& golden : equilink::testing::golden_frames()) {
    const auto fixture = equilink::testing::read_fixture(golden.name);
    ASSERT_FALSE(fixture.empty()) << golden.name;
    EXPECT_EQ(encode_frame(golden.message), fixture) << golden.name;
    EXPECT_EQ(decode_frame(fixture), golden.message) << golden.name;
  }
}

TEST(Frame, LiteralSmallFrames) {
  EXPECT_EQ(encode_frame(make_result(true)), bytes_of(R"({"body":{"equal":true},"kind":"RESULT"})"));
  EXPECT_EQ(encode_frame(make_abort("width-mismatch")),
            bytes_of(R"({"body":{"reason":"width-mismatch"},"kind":"ABORT"})"));
  EXPECT_EQ(encode_frame(make_advance({AdvanceAction::matched, std::vector<std::int64_t>{7, 9}})),
            bytes_of(R"({"body":{"action":"matched","ids":[7,9]},"kind":"ADVANCE"})"));
  EXPECT_EQ(encode_frame(make_advance({AdvanceAction::advance_bob, std::nullopt})),
            bytes_of(R"({"body":{"action":"advance_bob"},"kind":"ADVANCE"})"));
  EXPECT_EQ(encode_frame(make_hello(equilink::testing::golden_hello())),
            bytes_of(R"({"body":{"g":"ffffffea00000056","n":"ffffffea00000055","pad_to":3,"protocol_version":1,)"
                     R"("width":3},"kind":"HELLO"})"));
  const auto header = encode_frame(make_result(false));
  EXPECT_EQ(header[0], 0);
  EXPECT_EQ(header[3], header.size() - 4);
}

TEST(Frame, TypedBodiesSurviveTheWire) {
  const PublicKey& pk = key64().pub;
  const auto table = equilink::testing::golden_table();
  EXPECT_EQ(parse_table(decode_frame(encode_frame(make_table(table))), pk), table);
  const auto products = parse_products(decode_frame(equilink::testing::read_fixture("products")), pk);
  EXPECT_EQ(products.set_a, equilink::testing::golden_products().set_a);
  EXPECT_EQ(products.set_b, equilink::testing::golden_products().set_b);
  EXPECT_EQ(decrypt(pk, key64().priv, products.set_a[0]), 0);
  EXPECT_EQ(decrypt(pk, key64().priv, products.set_b[0]), 12);
  EXPECT_EQ(parse_hello(decode_frame(equilink::testing::read_fixture("hello"))), equilink::testing::golden_hello());
  EXPECT_TRUE(parse_result(decode_frame(equilink::testing::read_fixture("result"))));
  EXPECT_EQ(parse_abort(decode_frame(equilink::testing::read_fixture("abort"))), "width-mismatch");
  const Advance adv = parse_advance(decode_frame(equilink::testing::read_fixture("advance")));
  EXPECT_EQ(adv.action, AdvanceAction::matched);
  EXPECT_EQ(adv.ids, (std::vector<std::int64_t>{7, 9}));

  Hello counted = equilink::testing::golden_hello();
  counted.count = 600;
  EXPECT_EQ(parse_hello(decode_frame(encode_frame(make_hello(counted)))), counted);
}

TEST(Frame, RandomRoundTrips) {
  DeterministicRandom rng(99);
  for (int i = 0; i < 1000; ++i) {
    const WireMessage msg = random_message(rng);
    const auto frame = encode_frame(msg);
    ASSERT_EQ(decode_frame(frame), msg);
    ASSERT_EQ(encode_frame(decode_frame(frame)), frame);
  }
}

TEST(Frame, WidthThirtyTwoTableHasThirtyTwoColumns) {
  const EncryptionTable table = build_table(key64().pub, {123456789, 32}, system_random());
  const WireMessage msg = decode_frame(encode_frame(make_table(table)));
  ASSERT_TRUE(msg.body.is_array());
  EXPECT_EQ(msg.body.size(), 32U);
  for (const auto& col : msg.body) EXPECT_EQ(col.size(), 3U);
  EXPECT_EQ(msg.body.front()["pos"], 32);
  EXPECT_EQ(msg.body.back()["pos"], 1);
}

TEST(Frame, TruncationIsAFramingError) {
  const auto frame = equilink::testing::read_fixture("table");
  for (std::size_t len = 0; len < frame.size(); ++len) {
    ASSERT_EQ(code_of([&] { decode_frame(std::span(frame).first(len)); }), Errc::framing) << len;
  }
  auto longer = frame;
  longer.push_back('x');
  EXPECT_EQ(code_of([&] { decode_frame(longer); }), Errc::framing);
}

TEST(Frame, OversizeUnknownAndMalformedFrames) {
  std::vector<std::uint8_t> oversize = {0x04, 0x00, 0x00, 0x01};
  EXPECT_EQ(code_of([&] { decode_frame(oversize); }), Errc::framing);
  EXPECT_EQ(code_of([&] { decode_frame(bytes_of(R"({"body":{},"kind":"GOSSIP"})")); }), Errc::framing);
  EXPECT_EQ(code_of([&] { decode_frame(bytes_of(R"({"body":{},"kind":)")); }), Errc::framing);
  EXPECT_EQ(code_of([&] { decode_frame(bytes_of(R"({"kind":"RESULT"})")); }), Errc::framing);
  EXPECT_EQ(code_of([&] { decode_frame(bytes_of(R"([1,2,3])")); }), Errc::framing);
}

TEST(Frame, ParsersCheckKindAndShape) {
  const PublicKey& pk = key64().pub;
  EXPECT_EQ(code_of([] { parse_result(make_abort("x")); }), Errc::protocol);
  EXPECT_EQ(code_of([] { parse_result({MessageKind::result, {{"equal", 1}}}); }), Errc::framing);
  EXPECT_EQ(code_of([] { parse_hello({MessageKind::hello, {{"width", 3}}}); }), Errc::framing);
  EXPECT_EQ(code_of([] { parse_advance({MessageKind::advance, {{"action", "jump"}}}); }), Errc::framing);
  EXPECT_EQ(code_of([&] { parse_products({MessageKind::products, {{"set_a", "00"}, {"set_b", {}}}}, pk); }),
            Errc::framing);
  EXPECT_EQ(code_of([&] { parse_products({MessageKind::products, {{"set_a", {"xyz"}}, {"set_b", {}}}}, pk); }),
            Errc::framing);
  EXPECT_THROW(parse_products({MessageKind::products, {{"set_a", {"0"}}, {"set_b", nlohmann::json::array()}}}, pk),
               Error);
}

TEST(Channel, LoopbackDeliversInOrderAndCounts) {
  auto [a, b] = loopback_pair();
  a.send(make_result(true));
  a.send(make_advance({AdvanceAction::advance_alice, std::nullopt}));
  EXPECT_TRUE(parse_result(b.expect(MessageKind::result)));
  EXPECT_EQ(parse_advance(b.receive()).action, AdvanceAction::advance_alice);
  EXPECT_EQ(a.stats().frames_sent, 2U);
  EXPECT_EQ(b.stats().frames_received, 2U);
  EXPECT_EQ(a.stats().bytes_sent, b.stats().bytes_received);
  EXPECT_EQ(b.stats().received_by_kind[static_cast<std::size_t>(MessageKind::result)], 1U);
}

TEST(Channel, AbortFromPeerCarriesReason) {
  auto [a, b] = loopback_pair();
  a.abort("pad-mismatch");
  try {
    b.receive();
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::aborted);
    EXPECT_STREQ(e.what(), "pad-mismatch");
  }
}

TEST(Channel, UnexpectedKindAbortsThePeer) {
  auto [a, b] = loopback_pair();
  a.send(make_result(false));
  EXPECT_EQ(code_of([&] { b.expect(MessageKind::table); }), Errc::protocol);
  try {
    a.receive();
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::aborted);
    EXPECT_STREQ(e.what(), "unexpected-kind");
  }
}

TEST(Channel, TimeoutAndPeerCloseAreTransportErrors) {
  auto [a, b] = loopback_pair(100ms);
  EXPECT_EQ(code_of([&] { b.receive(); }), Errc::transport);
  a.close();
  EXPECT_EQ(code_of([&] { b.receive(); }), Errc::transport);
  EXPECT_EQ(code_of([&] { a.send(make_result(true)); }), Errc::transport);
}

TEST(Channel, GarbageOnTheWireIsAnsweredWithAbort) {
  Listener listener("127.0.0.1:0");
  const std::string endpoint = listener.endpoint();
  const auto colon = endpoint.rfind(':');
  const int port = std::stoi(endpoint.substr(colon + 1));

  Errc server_code = Errc::domain;
  std::thread server([&] {
    Channel ch = listener.accept(5000ms);
    server_code = code_of([&] { ch.receive(); });
  });

  const int fd = ::socket(AF_INET, SOCK_STREAM, 0);
  ASSERT_GE(fd, 0);
  sockaddr_in addr{};
  addr.sin_family = AF_INET;
  addr.sin_port = htons(static_cast<std::uint16_t>(port));
  addr.sin_addr.s_addr = htonl(INADDR_LOOPBACK);
  ASSERT_EQ(::connect(fd, reinterpret_cast<sockaddr*>(&addr), sizeof addr), 0);
  const auto garbage = bytes_of("not json at all");
  ASSERT_EQ(::send(fd, garbage.data(), garbage.size(), 0), static_cast<ssize_t>(garbage.size()));

  std::vector<std::uint8_t> reply(256);
  std::size_t got = 0;
  while (got < reply.size()) {
    const ssize_t n = ::recv(fd, reply.data() + got, reply.size() - got, 0);
    if (n <= 0) break;
    got += static_cast<std::size_t>(n);
  }
  ::close(fd);
  server.join();
  reply.resize(got);
  EXPECT_EQ(server_code, Errc::framing);
  EXPECT_EQ(decode_frame(reply), make_abort("framing-error"));
}

TEST(Endpoints, MemoryAndTcpListenDial) {
  for (const std::string requested : {"mem:transport-test", "127.0.0.1:0"}) {
    Listener listener(requested);
    const std::string endpoint = listener.endpoint();
    std::thread server([&] {
      Channel ch = listener.accept(5000ms);
      const bool v = parse_result(ch.expect(MessageKind::result));
      ch.send(make_result(!v));
    });
    Channel client = dial(endpoint, 5000ms);
    client.send(make_result(true));
    EXPECT_FALSE(parse_result(client.expect(MessageKind::result))) << requested;
    server.join();
  }
  EXPECT_EQ(code_of([] { Listener("nonsense"); }), Errc::config);
  EXPECT_EQ(code_of([] { dial("mem:nobody-here", 200ms); }), Errc::transport);
}

namespace {

/// Runs the responder on its own thread and returns what each side saw.
struct HandshakeOutcome {
  std::optional<Hello> initiator_view;
  std::optional<Hello> responder_view;
  std::string initiator_error;
};

HandshakeOutcome handshake(const Hello& alice, const Hello& bob) {
  auto [a, b] = loopback_pair(2000ms);
  HandshakeOutcome out;
  std::thread responder([&, &ch = b] {
    try {
      out.responder_view = handshake_responder(ch, bob);
    } catch (const Error&) {
    }
  });
  try {
    out.initiator_view = handshake_initiator(a, alice);
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::aborted);
    out.initiator_error = e.what();
  }
  responder.join();
  return out;
}

}  // namespace

TEST(Handshake, ResponderEchoesKey) {
  const Hello alice = equilink::testing::golden_hello();
  Hello bob = alice;
  bob.n = 0;
  bob.g = 0;
  const auto out = handshake(alice, bob);
  ASSERT_TRUE(out.initiator_view && out.responder_view);
  EXPECT_EQ(out.initiator_view->n, alice.n);
  EXPECT_EQ(*out.responder_view, alice);
}

TEST(Handshake, MismatchesAbortWithReason) {
  const Hello alice = equilink::testing::golden_hello();
  Hello bob = alice;
  bob.n = 0;
  bob.g = 0;

  Hello wide = bob;
  wide.width = 4;
  wide.pad_to = 4;
  EXPECT_EQ(handshake(alice, wide).initiator_error, "width-mismatch");

  Hello padded = bob;
  padded.pad_to = 5;
  EXPECT_EQ(handshake(alice, padded).initiator_error, "pad-mismatch");

  Hello future = bob;
  future.protocol_version = 2;
  EXPECT_EQ(handshake(alice, future).initiator_error, "version-mismatch");

  Hello keyless = alice;
  keyless.n = 0;
  keyless.g = 0;
  EXPECT_EQ(handshake(keyless, bob).initiator_error, "bad-key");

  Hello odd_g = alice;
  odd_g.g = alice.n + 2;
  EXPECT_EQ(handshake(odd_g, bob).initiator_error, "bad-key");
}
