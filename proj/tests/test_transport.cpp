/*
 * Copyright 2026 The triad-sim Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 * http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include <doctest.h>

#include "triad/protocol/messages.hpp"
#include "triad/sim/error.hpp"
#include "triad/sim/rng.hpp"
#include "triad/transport/network.hpp"
#include "triad/transport/seal.hpp"
#include "triad/transport/wire.hpp"

using namespace triad;
using namespace triad::transport;
using protocol::MessageKind;
using protocol::ProtocolMessage;
using namespace std::chrono_literals;

namespace {

ProtocolMessage random_valid_message(sim::RngStream& rng) {
  for (;;) {
    ProtocolMessage m;
    m.kind = static_cast<MessageKind>(rng.below(protocol::kMessageKindCount));
    m.sender = static_cast<EntityId>(rng.below(5));
    m.receiver = static_cast<EntityId>(rng.below(5));
    m.nonce = rng.next_u64();
    if (protocol::carries_sleep(m.kind)) m.sleep_ns = rng.next_u64() >> 1;
    if (protocol::carries_timestamp(m.kind)) m.payload_ns = rng.next_u64() >> 1;
    if (protocol::is_schema_valid(m)) return m;
  }
}

LinkKey test_key(std::uint8_t fill) {
  LinkKey k{};
  for (std::size_t i = 0; i < k.size(); ++i) k[i] = static_cast<std::uint8_t>(fill + i);
  return k;
}

}  // namespace

TEST_CASE("decode inverts encode over fuzzed messages") {
  sim::RngStream rng(1, "wire");
  for (int i = 0; i < 5000; ++i) {
    const ProtocolMessage m = random_valid_message(rng);
    const PlainFrame frame = encode(m);
    const auto back = decode(frame);
    REQUIRE(back.has_value());
    CHECK(*back == m);
  }
}

TEST_CASE("decode rejects malformed frames") {
  const PlainFrame frame = encode(protocol::make_ref_request(1, 9));
  CHECK_FALSE(decode(std::span(frame).first(kPlaintextSize - 1)).has_value());
  PlainFrame bad_kind = frame;
  bad_kind[0] = 17;
  CHECK_FALSE(decode(bad_kind).has_value());
  ProtocolMessage self = protocol::make_peer_request(1, 2, 3);
  self.receiver = 1;
  CHECK_THROWS_AS(encode(self), MalformedMessage);
}

TEST_CASE("sealed datagrams roundtrip") {
  const LinkKey key = test_key(3);
  NonceSequence nonces(2);
  sim::RngStream rng(2, "seal");
  for (int i = 0; i < 200; ++i) {
    const ProtocolMessage m = random_valid_message(rng);
    const auto datagram = seal(m, key, nonces.next());
    CHECK(datagram.size() == kDatagramSize);
    const auto opened = open(datagram, key);
    REQUIRE(opened.has_value());
    CHECK(*opened == m);
  }
}

TEST_CASE("tampered, truncated or misaddressed datagrams are discarded") {
  const LinkKey key = test_key(3);
  NonceSequence nonces(1);
  const auto datagram = seal(protocol::make_peer_request(1, 2, 5), key, nonces.next());
  CHECK_FALSE(open(std::span(datagram).first(datagram.size() - 1), key).has_value());
  CHECK_FALSE(open({}, key).has_value());
  CHECK_FALSE(open(datagram, test_key(4)).has_value());
  for (std::size_t i = 0; i < datagram.size(); ++i) {
    auto flipped = datagram;
    flipped[i] ^= 0x01;
    CHECK_FALSE(open(flipped, key).has_value());
  }
}

TEST_CASE("nonces never repeat and carry the sender") {
  NonceSequence a(1), b(2);
  const auto a0 = a.next(), a1 = a.next(), b0 = b.next();
  CHECK(a0 != a1);
  CHECK(a0 != b0);
  CHECK(a0[1] == 1);
  CHECK(b0[1] == 2);
}

TEST_CASE("the attacker view hides kind, sleep and payload") {
  ProtocolMessage one{MessageKind::TaSleepResponse, 0, 3, 77, 1'000'000'000, 0};
  ProtocolMessage zero = one;
  zero.sleep_ns = 0;
  CHECK(observe(one, at(1s)) == observe(zero, at(1s)));
  const LinkKey key = test_key(9);
  const auto d1 = seal(one, key, NonceSequence(0).next());
  const auto d0 = seal(zero, key, NonceSequence(0, 1).next());
  CHECK(d1.size() == d0.size());
  CHECK(*observe(d1, at(1s)) == *observe(d0, at(1s)));
  CHECK(*observe(d1, at(1s)) == observe(one, at(1s)));
  const AttackerView v = observe(one, at(1s));
  CHECK(v.sender == 0);
  CHECK(v.receiver == 3);
  CHECK(v.size_bytes == kDatagramSize);
  CHECK(v.send_time == at(1s));
}

TEST_CASE("network delivery examples") {
  sim::RngStreams streams(5);
  Network net(streams);
  net.add_link({0, 3, 5ms, sim::ConstantDelay{0ms}, 0.0});
  net.add_link({1, 3, 5ms, sim::ConstantDelay{0ms}, 1.0});
  const ProtocolMessage resp1{MessageKind::TaSleepResponse, 0, 3, 1, 1'000'000'000, 0};
  const ProtocolMessage resp0{MessageKind::TaSleepResponse, 0, 3, 2, 0, 0};

  SUBCASE("plain link") {
    const auto d = net.send(resp1, at(10s));
    REQUIRE(d);
    CHECK(d->due == at(10s) + 5ms);
    CHECK(d->hook_delay == 0ms);
  }
  SUBCASE("hook delays the one-second response") {
    net.mark_compromised(3);
    net.add_hook(3, [](const AttackerView&, const SleepEstimate& s) {
      return s && *s >= 500ms ? HookAction::delay_by(100ms) : HookAction::pass();
    });
    CHECK(net.send(resp1, at(10s))->due == at(10s) + 105ms);
    CHECK(net.send(resp0, at(10s))->due == at(10s) + 5ms);
  }
  SUBCASE("full loss drops") {
    CHECK_FALSE(net.send(protocol::make_peer_request(1, 3, 4), at(1s)).has_value());
    CHECK(net.dropped() == 1);
  }
  SUBCASE("missing link") { CHECK_THROWS_AS(net.send(protocol::make_peer_request(1, 2, 4), at(1s)), ConfigError); }
  SUBCASE("hooks need a compromised owner") {
    CHECK_THROWS_AS(net.add_hook(1, [](const AttackerView&, const SleepEstimate&) { return HookAction::drop(); }),
                    ConfigError);
    CHECK_THROWS_AS(net.mark_compromised(kTimeAuthority), ConfigError);
  }
  SUBCASE("duplicate link") { CHECK_THROWS_AS(net.add_link({3, 0}), ConfigError); }
}

TEST_CASE("hooks only see traffic adjacent to their owner") {
  sim::RngStreams streams(5);
  Network net(streams);
  net.add_link({1, 2, 5ms, sim::ConstantDelay{0ms}, 0.0});
  net.add_link({2, 3, 5ms, sim::ConstantDelay{0ms}, 0.0});
  net.mark_compromised(3);
  int calls = 0;
  net.add_hook(3, [&](const AttackerView&, const SleepEstimate&) {
    ++calls;
    return HookAction::drop();
  });
  CHECK(net.send(protocol::make_peer_request(1, 2, 1), at(1s)).has_value());
  CHECK(calls == 0);
  CHECK_FALSE(net.send(protocol::make_peer_request(2, 3, 2), at(1s)).has_value());
  CHECK(calls == 1);
}

TEST_CASE("hooks run in registration order and delays add up") {
  sim::RngStreams streams(5);
  Network net(streams);
  net.add_link({0, 1, 5ms, sim::ConstantDelay{0ms}, 0.0});
  net.mark_compromised(1);
  std::vector<int> order;
  net.add_hook(1, [&](const AttackerView&, const SleepEstimate&) {
    order.push_back(1);
    return HookAction::delay_by(1ms);
  });
  net.add_hook(1, [&](const AttackerView&, const SleepEstimate&) {
    order.push_back(2);
    return HookAction::delay_by(2ms);
  });
  CHECK(net.send(protocol::make_ref_request(1, 1), at(0s))->due == at(8ms));
  CHECK(order == std::vector<int>{1, 2});
}

TEST_CASE("classifier") {
  sim::RngStream rng(6, "cls");
  const ProtocolMessage resp1{MessageKind::TaSleepResponse, 0, 3, 1, 1'000'000'000, 0};
  CHECK(*SleepClassifier{}.estimate(resp1, rng) == 1s);
  CHECK_FALSE(SleepClassifier{}.estimate(protocol::make_ref_request(1, 1), rng).has_value());
  const SleepClassifier blind(0.0);
  CHECK_FALSE(blind.estimate(resp1, rng).has_value());
  const SleepClassifier half(0.5);
  int right = 0;
  for (int i = 0; i < 10'000; ++i) right += half.estimate(resp1, rng) == SleepEstimate{1s};
  CHECK(std::abs(right - 5000) < 250);
  CHECK_THROWS_AS(SleepClassifier(1.5), ConfigError);
}

TEST_CASE("jitter can reorder messages on one link") {
  sim::RngStreams streams(12);
  Network net(streams);
  net.add_link({1, 2});  // 5 ms + U[0, 2 ms]
  int reordered = 0;
  for (int i = 0; i < 1000; ++i) {
    const auto first = net.send(protocol::make_peer_request(1, 2, 1), at(1s));
    const auto second = net.send(protocol::make_peer_request(1, 2, 2), at(1s) + 100us);
    reordered += second->due < first->due;
  }
  CHECK(reordered > 0);
}

TEST_CASE("link validation") {
  CHECK_THROWS_AS((LinkModel{1, 1}).validate(), ConfigError);
  CHECK_THROWS_AS((LinkModel{1, 2, -1ms}).validate(), ConfigError);
  CHECK_THROWS_AS((LinkModel{1, 2, 1ms, sim::ConstantDelay{0ms}, 1.5}).validate(), ConfigError);
}
