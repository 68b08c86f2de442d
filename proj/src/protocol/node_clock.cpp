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

#include "triad/protocol/node_clock.hpp"

#include <cmath>
#include <string>

#include "triad/sim/error.hpp"

namespace triad::protocol {

Timestamp estimate_now(const NodeClock& clock, Ticks tsc_now) {
  if (!(clock.f_calib > 0.0)) throw ConfigError("node clock is not calibrated");
  if (tsc_now < clock.anchor_tsc) {
    throw BackwardsTsc("TSC read " + std::to_string(tsc_now) + " precedes anchor " +
                       std::to_string(clock.anchor_tsc));
  }
  const long double elapsed_ns = static_cast<long double>(tsc_now - clock.anchor_tsc) * 1e9L /
                                 static_cast<long double>(clock.f_calib);
  return clock.anchor_ref + Duration{static_cast<std::int64_t>(std::trunc(elapsed_ns))};
}

Ticks perceived_to_ticks(Duration perceived, double f_calib) {
  const long double ticks = static_cast<long double>(perceived.count()) *
                            static_cast<long double>(f_calib) / 1e9L;
  return static_cast<Ticks>(std::ceil(ticks));
}

}  // namespace triad::protocol
