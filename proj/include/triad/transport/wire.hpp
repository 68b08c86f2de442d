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
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>

#include "triad/protocol/messages.hpp"

namespace triad::transport {

/// kind:u8 | sender:u16 | receiver:u16 | nonce:u64 | sleep_ns:u64 | payload_ns:u64,
/// big-endian, absent fields zero.
inline constexpr std::size_t kPlaintextSize = 1 + 2 + 2 + 8 + 8 + 8;

using PlainFrame = std::array<std::uint8_t, kPlaintextSize>;

/// Throws MalformedMessage for messages outside the schema.
PlainFrame encode(const protocol::ProtocolMessage& msg);

/// nullopt for a wrong length, an unknown kind or a schema violation.
std::optional<protocol::ProtocolMessage> decode(std::span<const std::uint8_t> bytes);

}  // namespace triad::transport
