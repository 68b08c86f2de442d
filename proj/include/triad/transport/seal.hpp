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

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "triad/protocol/messages.hpp"
#include "triad/transport/wire.hpp"

namespace triad::transport {

// Live-mode datagram:
//
//   sender:u16 | receiver:u16 | nonce:96 bits | AES-256-GCM(plaintext frame) | tag:128 bits
//
// The cleartext header (addresses + nonce) is authenticated as associated
// data, so the tag covers the whole header. Only addressing, size and timing
// are visible on the wire.
inline constexpr std::size_t kHeaderSize = 2 + 2 + 12;
inline constexpr std::size_t kTagSize = 16;
inline constexpr std::size_t kDatagramSize = kHeaderSize + kPlaintextSize + kTagSize;

using LinkKey = std::array<std::uint8_t, 32>;
using Nonce96 = std::array<std::uint8_t, 12>;

/// Per-sender nonce source: the sender id and a 64-bit counter, so nonces never
/// repeat under one key as long as each sender owns its counter.
class NonceSequence {
 public:
  explicit NonceSequence(EntityId sender, std::uint64_t start = 0) : sender_(sender), counter_(start) {}
  Nonce96 next();

 private:
  EntityId sender_;
  std::uint64_t counter_;
};

/// Throws MalformedMessage for schema violations and Error if the cipher fails.
std::vector<std::uint8_t> seal(const protocol::ProtocolMessage& msg, const LinkKey& key,
                               const Nonce96& nonce);

/// nullopt on a wrong length, a failed tag check, a header that disagrees
/// with the encrypted addresses, or a malformed plaintext.
std::optional<protocol::ProtocolMessage> open(std::span<const std::uint8_t> datagram,
                                              const LinkKey& key);

/// What an on-path attacker can observe about one datagram.
struct AttackerView {
  EntityId sender = 0;
  EntityId receiver = 0;
  std::size_t size_bytes = 0;
  ReferenceTime send_time{};

  friend bool operator==(const AttackerView&, const AttackerView&) = default;
};

/// Projection of a live datagram. Reads only the cleartext header.
std::optional<AttackerView> observe(std::span<const std::uint8_t> datagram, ReferenceTime send_time);

/// Projection of a simulated message; identical to what observe() yields on
/// the sealed datagram.
AttackerView observe(const protocol::ProtocolMessage& msg, ReferenceTime send_time);

}  // namespace triad::transport
