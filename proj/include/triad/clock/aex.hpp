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

#include "triad/sim/distribution.hpp"

namespace triad::clock {

enum class AexRegime : std::uint8_t { TriadLike, LowAex, None, Custom };

const char* to_string(AexRegime regime);
/// Throws ConfigError on an unknown name.
AexRegime parse_aex_regime(std::string_view name);

/// Inter-AEX delays on a node's monitoring thread.
struct AexSchedule {
  AexRegime regime = AexRegime::TriadLike;
  /// Used only by the custom regime.
  sim::DurationDistribution custom = sim::ConstantDelay{Duration{std::chrono::seconds(1)}};
  /// Probability that an AEX of this node hits every node at the same instant.
  double correlated_probability = 0.0;

  static AexSchedule triad_like(double correlated = 0.0) { return {AexRegime::TriadLike, {}, correlated}; }
  static AexSchedule low_aex(double correlated = 0.0) { return {AexRegime::LowAex, {}, correlated}; }
  static AexSchedule none() { return {AexRegime::None, {}, 0.0}; }
  static AexSchedule custom_delays(sim::DurationDistribution dist, double correlated = 0.0) {
    return {AexRegime::Custom, std::move(dist), correlated};
  }

  /// Delay distribution of the regime; empty for `None`.
  std::optional<sim::DurationDistribution> distribution() const;

  void validate() const;
};

/// Three equiprobable atoms: 10 ms, 532 ms and 1590 ms.
sim::DurationDistribution triad_like_delays();
/// Isolated monitoring core: AEXs every 5.4 minutes.
sim::DurationDistribution low_aex_delays();

/// Time of the node's next AEX, or nullopt when the regime never interrupts.
std::optional<ReferenceTime> next_aex(const AexSchedule& schedule, ReferenceTime now,
                                      sim::RngStream& stream);

}  // namespace triad::clock
