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

#include "triad/transport/wire.hpp"

#include "triad/sim/error.hpp"

namespace triad::transport {

namespace {

template <typename T>
void put_be(std::uint8_t*& out, T value) {
  for (int i = sizeof(T) - 1; i >= 0; --i) *out++ = static_cast<std::uint8_t>(value >> (8 * i));
}

template <typename T>
T get_be(const std::uint8_t*& in) {
  T value = 0;
  for (std::size_t i = 0; i < sizeof(T); ++i) value = static_cast<T>((value << 8) | *in++);
  return value;
}

}  // namespace

PlainFrame encode(const protocol::ProtocolMessage& msg) {
  if (!protocol::is_schema_valid(msg)) {
    throw MalformedMessage(std::string("message outside schema: ") + protocol::to_string(msg.kind));
  }
  PlainFrame frame{};
  std::uint8_t* out = frame.data();
  put_be<std::uint8_t>(out, static_cast<std::uint8_t>(msg.kind));
  put_be<std::uint16_t>(out, msg.sender);
  put_be<std::uint16_t>(out, msg.receiver);
  put_be<std::uint64_t>(out, msg.nonce);
  put_be<std::uint64_t>(out, msg.sleep_ns);
  put_be<std::uint64_t>(out, msg.payload_ns);
  return frame;
}

std::optional<protocol::ProtocolMessage> decode(std::span<const std::uint8_t> bytes) {
  if (bytes.size() != kPlaintextSize) return std::nullopt;
  const std::uint8_t* in = bytes.data();
  const auto kind = get_be<std::uint8_t>(in);
  if (kind >= protocol::kMessageKindCount) return std::nullopt;
  protocol::ProtocolMessage msg;
  msg.kind = static_cast<protocol::MessageKind>(kind);
  msg.sender = get_be<std::uint16_t>(in);
  msg.receiver = get_be<std::uint16_t>(in);
  msg.nonce = get_be<std::uint64_t>(in);
  msg.sleep_ns = get_be<std::uint64_t>(in);
  msg.payload_ns = get_be<std::uint64_t>(in);
  if (!protocol::is_schema_valid(msg)) return std::nullopt;
  return msg;
}

}  // namespace triad::transport
