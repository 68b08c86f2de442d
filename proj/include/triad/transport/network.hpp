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

#include <functional>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "triad/protocol/messages.hpp"
#include "triad/sim/distribution.hpp"
#include "triad/sim/rng.hpp"
#include "triad/transport/seal.hpp"

namespace triad::transport {

using namespace std::chrono_literals;

/// Undirected link between two entities.
struct LinkModel {
  EntityId a = 0;
  EntityId b = 1;
  Duration base_delay = 5ms;
  sim::DurationDistribution jitter = sim::UniformDelay{0ms, 2ms};
  double loss_probability = 0.0;

  /// Throws ConfigError.
  void validate() const;
};

enum class HookVerdict : std::uint8_t { Pass, Delay, Drop };

struct HookAction {
  HookVerdict verdict = HookVerdict::Pass;
  Duration delay{};

  static HookAction pass() { return {}; }
  static HookAction delay_by(Duration d) { return {HookVerdict::Delay, d}; }
  static HookAction drop() { return {HookVerdict::Drop, {}}; }
};

/// The attacker's guess of the sleep a TA response answers, derived from
/// timing correlation. Empty when the datagram is not classified as a sleep
/// response.
using SleepEstimate = std::optional<Duration>;

/// Hooks see the attacker view and the classifier's guess; never the message.
using InterpositionHook = std::function<HookAction(const AttackerView&, const SleepEstimate&)>;

/// Grants the attacker sleep classification of TA sleep responses. With
/// probability `accuracy` a response is recognised and its sleep reported;
/// otherwise the attacker cannot tell it apart and gets no estimate.
class SleepClassifier {
 public:
  explicit SleepClassifier(double accuracy = 1.0);

  SleepEstimate estimate(const protocol::ProtocolMessage& msg, sim::RngStream& stream) const;

  double accuracy() const { return accuracy_; }

 private:
  double accuracy_;
};

struct Delivery {
  ReferenceTime due;
  Duration hook_delay{};
};

/// In-process network. Owns the links and the attacker hooks; the caller
/// schedules the returned delivery on its engine.
class Network {
 public:
  explicit Network(sim::RngStreams& streams, SleepClassifier classifier = SleepClassifier{});

  /// Throws ConfigError on a duplicate or invalid link.
  void add_link(LinkModel link);
  const LinkModel& link(EntityId a, EntityId b) const;
  bool has_link(EntityId a, EntityId b) const;

  void mark_compromised(EntityId node);
  bool is_compromised(EntityId node) const { return compromised_.count(node) > 0; }

  /// Registers a hook owned by `owner`. It fires on every message sent to or
  /// from `owner`. Throws ConfigError when `owner` is not compromised.
  void add_hook(EntityId owner, InterpositionHook hook);

  /// Hooks in registration order, then loss, then base delay plus jitter.
  /// nullopt when dropped. Throws ConfigError when no link exists.
  std::optional<Delivery> send(const protocol::ProtocolMessage& msg, ReferenceTime now);

  std::uint64_t sent() const { return sent_; }
  std::uint64_t dropped() const { return dropped_; }

 private:
  struct Link {
    LinkModel model;
    sim::RngStream* jitter;
    sim::RngStream* loss;
  };
  struct Hook {
    EntityId owner;
    InterpositionHook fn;
  };
  static std::pair<EntityId, EntityId> key(EntityId a, EntityId b) {
    return a < b ? std::pair{a, b} : std::pair{b, a};
  }

  sim::RngStreams& streams_;
  SleepClassifier classifier_;
  sim::RngStream* classifier_stream_;
  std::map<std::pair<EntityId, EntityId>, Link> links_;
  std::set<EntityId> compromised_;
  std::vector<Hook> hooks_;
  std::uint64_t sent_ = 0;
  std::uint64_t dropped_ = 0;
};

}  // namespace triad::transport
