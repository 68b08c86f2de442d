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

#include "triad/transport/seal.hpp"

#include <openssl/evp.h>

#include <memory>

#include "triad/sim/error.hpp"

namespace triad::transport {

namespace {

struct CipherCtxDeleter {
  void operator()(EVP_CIPHER_CTX* ctx) const { EVP_CIPHER_CTX_free(ctx); }
};
using CipherCtx = std::unique_ptr<EVP_CIPHER_CTX, CipherCtxDeleter>;

void write_header(std::uint8_t* out, EntityId sender, EntityId receiver, const Nonce96& nonce) {
  out[0] = static_cast<std::uint8_t>(sender >> 8);
  out[1] = static_cast<std::uint8_t>(sender);
  out[2] = static_cast<std::uint8_t>(receiver >> 8);
  out[3] = static_cast<std::uint8_t>(receiver);
  std::copy(nonce.begin(), nonce.end(), out + 4);
}

EntityId read_u16(const std::uint8_t* in) {
  return static_cast<EntityId>((static_cast<unsigned>(in[0]) << 8) | in[1]);
}

}  // namespace

Nonce96 NonceSequence::next() {
  Nonce96 nonce{};
  nonce[0] = static_cast<std::uint8_t>(sender_ >> 8);
  nonce[1] = static_cast<std::uint8_t>(sender_);
  const std::uint64_t value = counter_++;
  for (int i = 0; i < 8; ++i) nonce[4 + i] = static_cast<std::uint8_t>(value >> (8 * (7 - i)));
  return nonce;
}

std::vector<std::uint8_t> seal(const protocol::ProtocolMessage& msg, const LinkKey& key,
                               const Nonce96& nonce) {
  const PlainFrame plain = encode(msg);
  std::vector<std::uint8_t> out(kDatagramSize);
  write_header(out.data(), msg.sender, msg.receiver, nonce);

  CipherCtx ctx(EVP_CIPHER_CTX_new());
  int len = 0;
  if (!ctx || EVP_EncryptInit_ex(ctx.get(), EVP_aes_256_gcm(), nullptr, nullptr, nullptr) != 1 ||
      EVP_CIPHER_CTX_ctrl(ctx.get(), EVP_CTRL_GCM_SET_IVLEN, static_cast<int>(nonce.size()), nullptr) != 1 ||
      EVP_EncryptInit_ex(ctx.get(), nullptr, nullptr, key.data(), nonce.data()) != 1 ||
      EVP_EncryptUpdate(ctx.get(), nullptr, &len, out.data(), static_cast<int>(kHeaderSize)) != 1 ||
      EVP_EncryptUpdate(ctx.get(), out.data() + kHeaderSize, &len, plain.data(),
                        static_cast<int>(plain.size())) != 1 ||
      EVP_EncryptFinal_ex(ctx.get(), out.data() + kHeaderSize + len, &len) != 1 ||
      EVP_CIPHER_CTX_ctrl(ctx.get(), EVP_CTRL_GCM_GET_TAG, static_cast<int>(kTagSize),
                          out.data() + kHeaderSize + kPlaintextSize) != 1) {
    throw Error("AES-256-GCM encryption failed");
  }
  return out;
}

std::optional<protocol::ProtocolMessage> open(std::span<const std::uint8_t> datagram,
                                              const LinkKey& key) {
  if (datagram.size() != kDatagramSize) return std::nullopt;
  Nonce96 nonce{};
  std::copy(datagram.begin() + 4, datagram.begin() + kHeaderSize, nonce.begin());
  PlainFrame plain{};
  std::array<std::uint8_t, kTagSize> tag{};
  std::copy(datagram.begin() + kHeaderSize + kPlaintextSize, datagram.end(), tag.begin());

  CipherCtx ctx(EVP_CIPHER_CTX_new());
  int len = 0;
  if (!ctx || EVP_DecryptInit_ex(ctx.get(), EVP_aes_256_gcm(), nullptr, nullptr, nullptr) != 1 ||
      EVP_CIPHER_CTX_ctrl(ctx.get(), EVP_CTRL_GCM_SET_IVLEN, static_cast<int>(nonce.size()), nullptr) != 1 ||
      EVP_DecryptInit_ex(ctx.get(), nullptr, nullptr, key.data(), nonce.data()) != 1 ||
      EVP_DecryptUpdate(ctx.get(), nullptr, &len, datagram.data(), static_cast<int>(kHeaderSize)) != 1 ||
      EVP_DecryptUpdate(ctx.get(), plain.data(), &len, datagram.data() + kHeaderSize,
                        static_cast<int>(kPlaintextSize)) != 1 ||
      EVP_CIPHER_CTX_ctrl(ctx.get(), EVP_CTRL_GCM_SET_TAG, static_cast<int>(kTagSize), tag.data()) != 1) {
    return std::nullopt;
  }
  if (EVP_DecryptFinal_ex(ctx.get(), plain.data() + len, &len) != 1) return std::nullopt;

  auto msg = decode(plain);
  if (!msg) return std::nullopt;
  if (msg->sender != read_u16(datagram.data()) || msg->receiver != read_u16(datagram.data() + 2)) {
    return std::nullopt;
  }
  return msg;
}

std::optional<AttackerView> observe(std::span<const std::uint8_t> datagram, ReferenceTime send_time) {
  if (datagram.size() < kHeaderSize) return std::nullopt;
  return AttackerView{read_u16(datagram.data()), read_u16(datagram.data() + 2), datagram.size(),
                      send_time};
}

AttackerView observe(const protocol::ProtocolMessage& msg, ReferenceTime send_time) {
  return AttackerView{msg.sender, msg.receiver, kDatagramSize, send_time};
}

}  // namespace triad::transport
