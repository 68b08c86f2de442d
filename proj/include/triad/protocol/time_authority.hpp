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

#include "triad/protocol/messages.hpp"

namespace triad::protocol {

using namespace std::chrono_literals;

/// A response the TA wants sent `after` the request arrived.
struct TaReply {
  Duration after{};
  ProtocolMessage message;
};

/// Reference clock of the protocol. Sleep requests are answered after the
/// requested sleep; reference requests immediately, carrying the current
/// reference time. Both echo the request nonce.
class TimeAuthority {
 public:
  explicit TimeAuthority(Duration max_sleep = 10s) : max_sleep_(max_sleep) {}

  /// `now` is the reference time at which the request is handled. Malformed
  /// sleeps (negative or above max_sleep) and non-TA kinds are rejected.
  std::optional<TaReply> handle(const ProtocolMessage& msg, ReferenceTime now);

  std::uint64_t rejected() const { return rejected_; }
  std::uint64_t sleep_requests() const { return sleep_requests_; }
  std::uint64_t ref_requests() const { return ref_requests_; }
  Duration max_sleep() const { return max_sleep_; }

 private:
  Duration max_sleep_;
  std::uint64_t rejected_ = 0;
  std::uint64_t sleep_requests_ = 0;
  std::uint64_t ref_requests_ = 0;
};

}  // namespace triad::protocol
