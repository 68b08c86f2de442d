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

#include "triad/protocol/messages.hpp"

namespace triad::protocol {

const char* to_string(MessageKind kind) {
  switch (kind) {
    case MessageKind::TaSleepRequest: return "TaSleepRequest";
    case MessageKind::TaSleepResponse: return "TaSleepResponse";
    case MessageKind::TaRefRequest: return "TaRefRequest";
    case MessageKind::TaRefResponse: return "TaRefResponse";
    case MessageKind::PeerTimeRequest: return "PeerTimeRequest";
    case MessageKind::PeerTimeResponse: return "PeerTimeResponse";
  }
  return "?";
}

bool is_schema_valid(const ProtocolMessage& msg) {
  if (static_cast<std::uint8_t>(msg.kind) >= kMessageKindCount) return false;
  if (msg.sender == msg.receiver) return false;
  if (!carries_timestamp(msg.kind) && msg.payload_ns != 0) return false;
  if (!carries_sleep(msg.kind) && msg.sleep_ns != 0) return false;
  if (msg.sleep_ns > static_cast<std::uint64_t>(INT64_MAX)) return false;
  if (msg.payload_ns > static_cast<std::uint64_t>(INT64_MAX)) return false;
  switch (msg.kind) {
    case MessageKind::TaSleepRequest:
    case MessageKind::TaRefRequest:
      return msg.receiver == kTimeAuthority;
    case MessageKind::TaSleepResponse:
    case MessageKind::TaRefResponse:
      return msg.sender == kTimeAuthority;
    case MessageKind::PeerTimeRequest:
    case MessageKind::PeerTimeResponse:
      return msg.sender != kTimeAuthority && msg.receiver != kTimeAuthority;
  }
  return false;
}

ProtocolMessage make_sleep_request(EntityId node, std::uint64_t nonce, Duration sleep) {
  return {MessageKind::TaSleepRequest, node, kTimeAuthority, nonce,
          static_cast<std::uint64_t>(sleep.count()), 0};
}

ProtocolMessage make_ref_request(EntityId node, std::uint64_t nonce) {
  return {MessageKind::TaRefRequest, node, kTimeAuthority, nonce, 0, 0};
}

ProtocolMessage make_peer_request(EntityId node, EntityId peer, std::uint64_t nonce) {
  return {MessageKind::PeerTimeRequest, node, peer, nonce, 0, 0};
}

ProtocolMessage make_peer_response(const ProtocolMessage& request, Timestamp now) {
  return {MessageKind::PeerTimeResponse, request.receiver, request.sender, request.nonce, 0,
          static_cast<std::uint64_t>(now.ns)};
}

}  // namespace triad::protocol
