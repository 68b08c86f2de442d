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

#include "triad/attacks/policy.hpp"

#include <cmath>
#include <string>

#include "triad/sim/error.hpp"

namespace triad::attacks {

namespace {

constexpr std::pair<AttackKind, std::string_view> kNames[] = {
    {AttackKind::None, "none"},           {AttackKind::FPlus, "f_plus"},
    {AttackKind::FMinus, "f_minus"},      {AttackKind::AexSuppress, "aex_suppress"},
    {AttackKind::AexFlood, "aex_flood"},  {AttackKind::TscOffset, "tsc_offset"},
    {AttackKind::TscScale, "tsc_scale"},  {AttackKind::Custom, "custom"},
};

bool is_ta_response_to(const AttackPolicy& policy, const transport::AttackerView& view) {
  return view.sender == kTimeAuthority && view.receiver == policy.node;
}

}  // namespace

const char* to_string(AttackKind kind) {
  for (const auto& [k, name] : kNames) {
    if (k == kind) return name.data();
  }
  return "?";
}

AttackKind parse_attack_kind(std::string_view name) {
  for (const auto& [k, n] : kNames) {
    if (n == name) return k;
  }
  throw ConfigError("unknown attack kind '" + std::string(name) + "'");
}

void AttackPolicy::validate() const {
  if (kind == AttackKind::None) return;
  if (node == kTimeAuthority) throw ConfigError("attack node must be a Triad node");
  if (added_delay < Duration::zero()) throw ConfigError("added_delay is negative");
  if (s_threshold < Duration::zero()) throw ConfigError("s_threshold is negative");
  if (!(classifier_accuracy >= 0.0 && classifier_accuracy <= 1.0))
    throw ConfigError("classifier_accuracy outside [0, 1]");
  if (kind == AttackKind::TscScale && !(tsc_scale > 0.0)) throw ConfigError("TSC scale must be positive");
  if (kind == AttackKind::AexFlood && !(flood_rate_hz > 0.0))
    throw ConfigError("flood rate must be positive");
  if (kind == AttackKind::Custom && rules.empty()) throw ConfigError("custom policy has no rules");
}

transport::HookAction f_plus_hook(const AttackPolicy& policy, const transport::AttackerView& view,
                                  const transport::SleepEstimate& estimated_s) {
  if (!is_ta_response_to(policy, view) || !estimated_s) return transport::HookAction::pass();
  if (*estimated_s >= policy.s_threshold) return transport::HookAction::delay_by(policy.added_delay);
  return transport::HookAction::pass();
}

transport::HookAction f_minus_hook(const AttackPolicy& policy, const transport::AttackerView& view,
                                   const transport::SleepEstimate& estimated_s) {
  if (!is_ta_response_to(policy, view) || !estimated_s) return transport::HookAction::pass();
  if (*estimated_s < policy.s_threshold) return transport::HookAction::delay_by(policy.added_delay);
  return transport::HookAction::pass();
}

transport::HookAction custom_hook(const AttackPolicy& policy, const transport::AttackerView& view,
                                  const transport::SleepEstimate& estimated_s) {
  for (const CustomRule& rule : policy.rules) {
    if (rule.sender && *rule.sender != view.sender) continue;
    if (rule.receiver && *rule.receiver != view.receiver) continue;
    if (rule.high_sleep) {
      if (!estimated_s) continue;
      if ((*estimated_s >= policy.s_threshold) != *rule.high_sleep) continue;
    }
    return rule.action;
  }
  return transport::HookAction::pass();
}

std::optional<transport::InterpositionHook> make_hook(const AttackPolicy& policy) {
  if (!policy.uses_hook()) return std::nullopt;
  using Fn = transport::HookAction (*)(const AttackPolicy&, const transport::AttackerView&,
                                       const transport::SleepEstimate&);
  Fn fn = policy.kind == AttackKind::FPlus    ? &f_plus_hook
          : policy.kind == AttackKind::FMinus ? &f_minus_hook
                                              : &custom_hook;
  return transport::InterpositionHook(
      [policy, fn](const transport::AttackerView& view, const transport::SleepEstimate& s) {
        if (view.send_time < policy.active_from) return transport::HookAction::pass();
        return fn(policy, view, s);
      });
}

void install(const AttackPolicy& policy, transport::Network& network) {
  policy.validate();
  if (!policy.is_active()) return;
  network.mark_compromised(policy.node);
  if (auto hook = make_hook(policy)) network.add_hook(policy.node, std::move(*hook));
}

clock::AexSchedule aex_shape(bool node_is_compromised, AexMode mode, double flood_rate_hz) {
  if (!node_is_compromised) throw ConfigError("AEX shaping requires a compromised node");
  if (mode == AexMode::Suppress) return clock::AexSchedule::none();
  if (!(flood_rate_hz > 0.0)) throw ConfigError("flood rate must be positive");
  const auto period = Duration{static_cast<std::int64_t>(std::llround(1e9 / flood_rate_hz))};
  if (period <= Duration::zero()) throw ConfigError("flood rate too high");
  return clock::AexSchedule::custom_delays(sim::ConstantDelay{period});
}

clock::TscModel tsc_manipulate(bool node_is_compromised, clock::TscTimeline& timeline,
                               ReferenceTime when, std::optional<Ticks> offset,
                               std::optional<double> scale) {
  if (!node_is_compromised) throw ConfigError("TSC manipulation requires a compromised node");
  if (scale && !(*scale > 0.0)) throw ConfigError("TSC scale must be positive");
  clock::TscModel model = timeline.model_at(when);
  if (scale && *scale != model.scale) {
    const Ticks before = timeline.read(when);
    model.scale = *scale;
    model.offset = 0;
    model.offset = before - clock::tsc_read(model, when);
  }
  if (offset) model.offset += *offset;
  timeline.apply(when, model);
  return model;
}

}  // namespace triad::attacks
