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

#include "triad/clock/aex.hpp"

#include <string>

#include "triad/sim/error.hpp"

namespace triad::clock {

using namespace std::chrono_literals;

const char* to_string(AexRegime regime) {
  switch (regime) {
    case AexRegime::TriadLike: return "triad_like";
    case AexRegime::LowAex: return "low_aex";
    case AexRegime::None: return "none";
    case AexRegime::Custom: return "custom";
  }
  return "?";
}

AexRegime parse_aex_regime(std::string_view name) {
  if (name == "triad_like") return AexRegime::TriadLike;
  if (name == "low_aex") return AexRegime::LowAex;
  if (name == "none") return AexRegime::None;
  if (name == "custom") return AexRegime::Custom;
  throw ConfigError("unknown AEX regime '" + std::string(name) + "'");
}

sim::DurationDistribution triad_like_delays() {
  return sim::DiscreteDelay{{10ms, 532ms, 1590ms}, {1.0, 1.0, 1.0}};
}

sim::DurationDistribution low_aex_delays() { return sim::ConstantDelay{324s}; }

std::optional<sim::DurationDistribution> AexSchedule::distribution() const {
  switch (regime) {
    case AexRegime::TriadLike: return triad_like_delays();
    case AexRegime::LowAex: return low_aex_delays();
    case AexRegime::None: return std::nullopt;
    case AexRegime::Custom: return custom;
  }
  return std::nullopt;
}

void AexSchedule::validate() const {
  if (correlated_probability < 0.0 || correlated_probability > 1.0)
    throw ConfigError("correlated AEX probability outside [0, 1]");
  if (regime == AexRegime::Custom) {
    sim::validate(custom);
    if (sim::max_value(custom) <= Duration::zero())
      throw ConfigError("custom AEX distribution never advances time");
  }
}

std::optional<ReferenceTime> next_aex(const AexSchedule& schedule, ReferenceTime now,
                                      sim::RngStream& stream) {
  const auto dist = schedule.distribution();
  if (!dist) return std::nullopt;
  return now + sim::sample_duration(*dist, stream);
}

}  // namespace triad::clock
