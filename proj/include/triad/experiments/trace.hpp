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
#include <map>
#include <optional>
#include <vector>

#include "triad/experiments/scenario.hpp"
#include "triad/protocol/node.hpp"

namespace triad::experiments {

/// One sampled row: a node's state and clock at reference time t.
struct ScenarioRecord {
  ReferenceTime t;
  EntityId node = 1;
  protocol::NodeState state = protocol::NodeState::FullCalib;
  /// The node's current belief (empty before the first reference).
  std::optional<Timestamp> node_time;
  /// Timestamp handed to a client at this sample; empty unless OK.
  std::optional<Timestamp> served;
  std::uint64_t cum_aex = 0;
  std::uint64_t cum_ta_ref = 0;
  /// Clock re-anchors and speed calibrations of this node so far; records
  /// sharing an epoch lie on one linear drift segment.
  std::uint32_t epoch = 0;

  /// node_time - t, exact.
  std::optional<Duration> drift() const {
    if (!node_time) return std::nullopt;
    return *node_time - t;
  }
};

struct StateChange {
  ReferenceTime t;
  EntityId node = 1;
  std::optional<protocol::NodeState> from;
  protocol::NodeState to = protocol::NodeState::FullCalib;
};

struct JumpRecord {
  ReferenceTime t;
  EntityId node = 1;
  protocol::JumpEvent jump;
};

struct CalibrationRecord {
  ReferenceTime t;
  EntityId node = 1;
  protocol::SpeedCalibration result;
  /// Effective TSC rate at that time, for comparison.
  double true_tsc_hz = 0.0;
};

enum class DetectionCause : std::uint8_t { TscManipulation, FalseAlarm };

struct MonitorDetection {
  ReferenceTime t;
  EntityId node = 1;
  DetectionCause cause = DetectionCause::TscManipulation;
  double observed_count = 0.0;
};

/// Per node: exact reference time spent in each state.
using StateTimes = std::array<Duration, protocol::kNodeStateCount>;

struct Trace {
  Scenario scenario;
  ReferenceTime horizon{};
  std::vector<ScenarioRecord> records;
  std::vector<StateChange> transitions;
  std::vector<JumpRecord> jumps;
  std::vector<CalibrationRecord> calibrations;
  std::vector<MonitorDetection> detections;
  /// node -> (1 ms bin start in ns -> count) of drawn inter-AEX delays.
  std::map<EntityId, std::map<std::int64_t, std::uint64_t>> aex_delay_hist;
  /// Indexed by node id - 1.
  std::vector<StateTimes> state_times;
  std::vector<std::uint64_t> aex_counts;
  std::vector<std::uint64_t> ta_references;
  std::vector<std::uint64_t> peer_untaints;
  /// Served timestamps that failed to exceed the previous one.
  std::vector<std::uint64_t> monotonic_violations;
  std::vector<std::uint64_t> served_count;
  std::uint64_t events_dispatched = 0;
  std::uint64_t event_digest = 0;
};

}  // namespace triad::experiments
