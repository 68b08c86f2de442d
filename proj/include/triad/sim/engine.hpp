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
#include <queue>
#include <string>
#include <unordered_set>
#include <utility>
#include <vector>

#include "triad/sim/error.hpp"
#include "triad/sim/rng.hpp"
#include "triad/sim/time.hpp"

namespace triad::sim {

enum class EventKind : std::uint8_t {
  Aex,
  MessageDelivery,
  Timer,
  SampleWindowEnd,
  Control,
};

const char* to_string(EventKind kind);

using EventId = std::uint64_t;

struct SimConfig {
  std::uint64_t seed = 1;
  ReferenceTime horizon{};
  /// Keep every dispatched event in the trace. Off for long scenario runs,
  /// where the digest alone witnesses determinism.
  bool keep_dispatch_log = true;
};

struct DispatchRecord {
  ReferenceTime due;
  std::uint64_t sequence = 0;
  EntityId target = 0;
  EventKind kind = EventKind::Control;

  friend bool operator==(const DispatchRecord&, const DispatchRecord&) = default;
};

/// Immutable result of a run. `digest` folds (due, sequence, target, kind) of
/// every dispatched event, so equal digests are the cheap determinism check
/// when the full log is not kept.
struct DispatchTrace {
  std::vector<DispatchRecord> log;
  std::uint64_t dispatched = 0;
  ReferenceTime final_time{};
  std::uint64_t digest = 0xcbf29ce484222325ULL;

  /// Canonical byte serialization (little-endian fixed-width fields).
  std::string serialize() const;
};

void fold_digest(std::uint64_t& digest, const DispatchRecord& record);

/// Deterministic discrete-event engine. Events are ordered by (due, sequence);
/// sequence numbers are handed out in scheduling order, so two events due at
/// the same instant dispatch in the order they were scheduled.
template <typename Payload>
class Engine {
 public:
  struct Event {
    ReferenceTime due;
    std::uint64_t sequence = 0;
    EntityId target = 0;
    EventKind kind = EventKind::Control;
    Payload payload{};
  };

  explicit Engine(SimConfig config) : config_(config), streams_(config.seed) {}

  Engine(const Engine&) = delete;
  Engine& operator=(const Engine&) = delete;

  ReferenceTime now() const { return now_; }
  const SimConfig& config() const { return config_; }
  RngStreams& streams() { return streams_; }
  std::size_t pending() const { return live_.size(); }

  EventId schedule(ReferenceTime due, EntityId target, EventKind kind, Payload payload) {
    if (due < now_) {
      throw ScheduleInPast("event due at " + std::to_string(due.ns) + "ns is before now (" +
                           std::to_string(now_.ns) + "ns)");
    }
    const std::uint64_t seq = next_sequence_++;
    queue_.push(Event{due, seq, target, kind, std::move(payload)});
    live_.insert(seq);
    return seq;
  }

  EventId schedule_after(Duration delay, EntityId target, EventKind kind, Payload payload) {
    if (delay < Duration::zero()) {
      throw ScheduleInPast("negative delay " + std::to_string(delay.count()) + "ns");
    }
    return schedule(now_ + delay, target, kind, std::move(payload));
  }

  /// Returns false if the event already fired or was cancelled.
  bool cancel(EventId id) { return live_.erase(id) > 0; }

  bool is_pending(EventId id) const { return live_.count(id) > 0; }

  /// Dispatches every event with due <= horizon, in order, through
  /// `handler(engine, event)`. Handlers may schedule further events. Time ends
  /// at `horizon` even if the queue drains earlier.
  template <typename Handler>
  DispatchTrace run_until(ReferenceTime horizon, Handler&& handler) {
    DispatchTrace trace;
    while (!queue_.empty() && queue_.top().due <= horizon) {
      Event event = queue_.top();
      queue_.pop();
      if (live_.erase(event.sequence) == 0) continue;
      now_ = event.due;
      const DispatchRecord record{event.due, event.sequence, event.target, event.kind};
      fold_digest(trace.digest, record);
      ++trace.dispatched;
      if (config_.keep_dispatch_log) trace.log.push_back(record);
      handler(*this, event);
    }
    if (horizon > now_) now_ = horizon;
    trace.final_time = now_;
    return trace;
  }

 private:
  struct Later {
    bool operator()(const Event& a, const Event& b) const {
      if (a.due != b.due) return a.due > b.due;
      return a.sequence > b.sequence;
    }
  };

  SimConfig config_;
  RngStreams streams_;
  ReferenceTime now_{};
  std::uint64_t next_sequence_ = 0;
  std::priority_queue<Event, std::vector<Event>, Later> queue_;
  std::unordered_set<std::uint64_t> live_;
};

}  // namespace triad::sim
