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

#include <optional>
#include <string_view>
#include <vector>

#include "triad/clock/aex.hpp"
#include "triad/clock/tsc.hpp"
#include "triad/transport/network.hpp"

namespace triad::attacks {

using namespace std::chrono_literals;

enum class AttackKind : std::uint8_t {
  None,
  FPlus,
  FMinus,
  AexSuppress,
  AexFlood,
  TscOffset,
  TscScale,
  Custom,
};

const char* to_string(AttackKind kind);
/// Throws ConfigError on an unknown name.
AttackKind parse_attack_kind(std::string_view name);

/// One rule of a custom policy. Empty fields match anything.
struct CustomRule {
  std::optional<EntityId> sender;
  std::optional<EntityId> receiver;
  /// Matches sleep responses whose estimated sleep is at least (true) or
  /// below (false) the policy threshold.
  std::optional<bool> high_sleep;
  transport::HookAction action;
};

/// What the attacker running the OS of `node` does.
struct AttackPolicy {
  AttackKind kind = AttackKind::None;
  EntityId node = 0;
  /// Reference time from which the policy acts.
  ReferenceTime active_from{};

  Duration added_delay = 100ms;
  Duration s_threshold = 500ms;
  double classifier_accuracy = 1.0;

  Ticks tsc_offset = 0;
  double tsc_scale = 1.0;
  /// Apply the TSC change while the enclave is exited, so no monitoring
  /// window spans it.
  bool tsc_during_exit = false;

  double flood_rate_hz = 100.0;
  std::vector<CustomRule> rules;

  bool is_active() const { return kind != AttackKind::None; }
  bool uses_hook() const {
    return kind == AttackKind::FPlus || kind == AttackKind::FMinus || kind == AttackKind::Custom;
  }
  bool uses_tsc() const { return kind == AttackKind::TscOffset || kind == AttackKind::TscScale; }
  bool uses_aex() const { return kind == AttackKind::AexSuppress || kind == AttackKind::AexFlood; }

  /// Throws ConfigError.
  void validate() const;
};

/// Delays TA sleep responses classified at or above the threshold.
transport::HookAction f_plus_hook(const AttackPolicy& policy, const transport::AttackerView& view,
                                  const transport::SleepEstimate& estimated_s);

/// Delays TA sleep responses classified below the threshold.
transport::HookAction f_minus_hook(const AttackPolicy& policy, const transport::AttackerView& view,
                                   const transport::SleepEstimate& estimated_s);

transport::HookAction custom_hook(const AttackPolicy& policy, const transport::AttackerView& view,
                                  const transport::SleepEstimate& estimated_s);

/// Hook closure for the policy (inactive before active_from). Empty for
/// policies that do not act on messages.
std::optional<transport::InterpositionHook> make_hook(const AttackPolicy& policy);

/// Marks the node compromised and registers the policy's hook.
void install(const AttackPolicy& policy, transport::Network& network);

enum class AexMode : std::uint8_t { Suppress, Flood };

/// Schedule the attacker imposes on its own node. Throws ConfigError when
/// `node_is_compromised` is false or the flood rate is not positive.
clock::AexSchedule aex_shape(bool node_is_compromised, AexMode mode, double flood_rate_hz = 100.0);

/// Changes the TSC at `when` by `offset` ticks and/or to a new `scale`. The
/// counter stays continuous across a scale change; only `offset` makes it
/// jump. Throws ConfigError for a scale <= 0 or an honest node.
clock::TscModel tsc_manipulate(bool node_is_compromised, clock::TscTimeline& timeline,
                               ReferenceTime when, std::optional<Ticks> offset,
                               std::optional<double> scale);

}  // namespace triad::attacks
