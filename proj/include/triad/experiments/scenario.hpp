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
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "triad/attacks/policy.hpp"
#include "triad/clock/aex.hpp"
#include "triad/clock/monitor.hpp"
#include "triad/clock/tsc.hpp"
#include "triad/sim/distribution.hpp"

namespace triad::experiments {

using namespace std::chrono_literals;

inline constexpr int kScenarioSchemaVersion = 1;

struct NodeSpec {
  clock::AexSchedule aex = clock::AexSchedule::triad_like();
  std::uint64_t tsc_hz = clock::kTestbedTscHz;
  Ticks tsc_offset = 0;
  double calibration_bias_ppm = 0.0;
};

struct LinkSpec {
  Duration base_delay = 5ms;
  sim::DurationDistribution jitter = sim::UniformDelay{0ms, 2ms};
  double loss_probability = 0.0;
};

/// Link parameters for one pair, replacing the default.
struct LinkOverride {
  EntityId a = 0;
  EntityId b = 1;
  LinkSpec link;
};

struct RegimeSwitch {
  Duration at{};
  EntityId node = 1;
  clock::AexSchedule schedule;
};

struct ProtocolTiming {
  std::vector<Duration> calibration_sleeps{0s, 1s};
  std::uint32_t calibration_pairs = 8;
  std::uint32_t sample_retries = 3;
  Duration peer_timeout = 200ms;
  Duration ta_timeout = 200ms;
};

struct Scenario {
  std::string name = "unnamed";
  std::string description;
  std::uint64_t seed = 1;
  Duration horizon = 60s;
  Duration sample_interval = 100ms;
  /// Node i+1 is nodes[i].
  std::vector<NodeSpec> nodes;
  LinkSpec links;
  std::vector<LinkOverride> link_overrides;
  std::vector<attacks::AttackPolicy> attacks;
  std::vector<RegimeSwitch> switches;
  ProtocolTiming timing;
  clock::MonitorCounter monitor;

  std::size_t node_count() const { return nodes.size(); }

  /// Throws ValidationError naming the offending field.
  void validate() const;

  /// Parameters of the link between a and b.
  const LinkSpec& link_between(EntityId a, EntityId b) const;

  const attacks::AttackPolicy* attack_on(EntityId node) const;
};

/// Accepts integers (nanoseconds) or strings such as "100ms", "5.4min",
/// "8h", "250us". Throws ConfigError.
Duration parse_duration(std::string_view text);
/// Shortest exact rendering ("1590ms", "8h", "1234ns").
std::string format_duration(Duration d);

/// Throws ValidationError with the JSON path of the offending field.
Scenario scenario_from_json(const nlohmann::json& doc);
nlohmann::json scenario_to_json(const Scenario& scenario);

/// Reads and validates a scenario file. Throws IoError or ValidationError.
Scenario load_scenario(const std::string& path);

}  // namespace triad::experiments
