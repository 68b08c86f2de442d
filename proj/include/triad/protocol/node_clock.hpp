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

#include "triad/sim/time.hpp"

namespace triad::protocol {

/// A node's calibrated belief about time: at TSC value `anchor_tsc` the time
/// was `anchor_ref`, and the TSC advances `f_calib` ticks per second.
struct NodeClock {
  Timestamp anchor_ref{};
  Ticks anchor_tsc = 0;
  double f_calib = 0.0;
  bool tainted = true;
  std::optional<Timestamp> last_served;
};

/// anchor_ref + (tsc_now - anchor_tsc) / f_calib, truncated to whole
/// nanoseconds. Throws BackwardsTsc when tsc_now < anchor_tsc and ConfigError
/// when the clock has no positive f_calib yet.
Timestamp estimate_now(const NodeClock& clock, Ticks tsc_now);

/// Converts a span of node-perceived time into TSC ticks at rate f_calib.
Ticks perceived_to_ticks(Duration perceived, double f_calib);

}  // namespace triad::protocol
