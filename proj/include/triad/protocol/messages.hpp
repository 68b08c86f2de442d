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

#pragma once

#include <cstdint>
#include <optional>
#include <string_view>

#include "triad/sim/time.hpp"

namespace triad::protocol {

enum class MessageKind : std::uint8_t {
  TaSleepRequest = 0,
  TaSleepResponse = 1,
  TaRefRequest = 2,
  TaRefResponse = 3,
  PeerTimeRequest = 4,
  PeerTimeResponse = 5,
};

inline constexpr std::uint8_t kMessageKindCount = 6;

const char* to_string(MessageKind kind);

constexpr bool carries_timestamp(MessageKind kind) {
  return kind == MessageKind::TaRefResponse || kind == MessageKind::PeerTimeResponse;
}

constexpr bool carries_sleep(MessageKind kind) {
  return kind == MessageKind::TaSleepRequest || kind == MessageKind::TaSleepResponse;
}

/// One protocol datagram. Fields a kind does not use stay zero.
struct ProtocolMessage {
  MessageKind kind = MessageKind::PeerTimeRequest;
  EntityId sender = 0;
  EntityId receiver = 0;
  std::uint64_t nonce = 0;
  std::uint64_t sleep_ns = 0;
  std::uint64_t payload_ns = 0;

  Duration requested_sleep() const { return Duration{static_cast<std::int64_t>(sleep_ns)}; }
  Timestamp timestamp() const { return Timestamp{static_cast<std::int64_t>(payload_ns)}; }

  friend bool operator==(const ProtocolMessage&, const ProtocolMessage&) = default;
};

/// Schema check: a payload only on time-carrying responses, a sleep only on TA
/// sleep traffic, no self-addressed messages.
bool is_schema_valid(const ProtocolMessage& msg);

ProtocolMessage make_sleep_request(EntityId node, std::uint64_t nonce, Duration sleep);
ProtocolMessage make_ref_request(EntityId node, std::uint64_t nonce);
ProtocolMessage make_peer_request(EntityId node, EntityId peer, std::uint64_t nonce);
ProtocolMessage make_peer_response(const ProtocolMessage& request, Timestamp now);

}  // namespace triad::protocol
