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

#include "triad/protocol/time_authority.hpp"

namespace triad::protocol {

std::optional<TaReply> TimeAuthority::handle(const ProtocolMessage& msg, ReferenceTime now) {
  if (msg.receiver != kTimeAuthority || !is_schema_valid(msg)) {
    ++rejected_;
    return std::nullopt;
  }
  switch (msg.kind) {
    case MessageKind::TaSleepRequest: {
      const Duration sleep = msg.requested_sleep();
      if (sleep < Duration::zero() || sleep > max_sleep_) {
        ++rejected_;
        return std::nullopt;
      }
      ++sleep_requests_;
      return TaReply{sleep, {MessageKind::TaSleepResponse, kTimeAuthority, msg.sender, msg.nonce,
                             msg.sleep_ns, 0}};
    }
    case MessageKind::TaRefRequest:
      ++ref_requests_;
      return TaReply{Duration::zero(),
                     {MessageKind::TaRefResponse, kTimeAuthority, msg.sender, msg.nonce, 0, now.ns}};
    default:
      ++rejected_;
      return std::nullopt;
  }
}

}  // namespace triad::protocol
