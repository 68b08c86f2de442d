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

#include <chrono>
#include <compare>
#include <cstdint>
#include <limits>

namespace triad {

/// Signed nanosecond durations. Every duration the simulator handles (10 ms AEX
/// atoms up to multi-hour horizons) is exactly representable.
using Duration = std::chrono::nanoseconds;

using Ticks = std::int64_t;
using EntityId = std::uint16_t;

/// The Time Authority always has entity id 0; Triad nodes are numbered from 1.
inline constexpr EntityId kTimeAuthority = 0;

/// Reference time: nanoseconds since simulation epoch on the Time Authority's
/// timeline.
struct ReferenceTime {
  std::uint64_t ns = 0;

  static constexpr ReferenceTime max() {
    return ReferenceTime{std::numeric_limits<std::uint64_t>::max()};
  }

  friend constexpr auto operator<=>(ReferenceTime, ReferenceTime) = default;

  constexpr ReferenceTime operator+(Duration d) const {
    return ReferenceTime{ns + static_cast<std::uint64_t>(d.count())};
  }
  friend constexpr Duration operator-(ReferenceTime a, ReferenceTime b) {
    return Duration{static_cast<std::int64_t>(a.ns - b.ns)};
  }
  constexpr Duration since_epoch() const { return Duration{static_cast<std::int64_t>(ns)}; }
};

constexpr ReferenceTime at(Duration since_epoch) {
  return ReferenceTime{static_cast<std::uint64_t>(since_epoch.count())};
}

/// A node's belief of the current time, in nanoseconds on the reference scale.
struct Timestamp {
  std::int64_t ns = 0;

  friend constexpr auto operator<=>(Timestamp, Timestamp) = default;

  constexpr Timestamp operator+(Duration d) const { return Timestamp{ns + d.count()}; }
  friend constexpr Duration operator-(Timestamp a, Timestamp b) { return Duration{a.ns - b.ns}; }
  friend constexpr Duration operator-(Timestamp a, ReferenceTime b) {
    return Duration{a.ns - static_cast<std::int64_t>(b.ns)};
  }
};

constexpr Timestamp as_timestamp(ReferenceTime t) {
  return Timestamp{static_cast<std::int64_t>(t.ns)};
}

inline constexpr Duration kOneNanosecond{1};

constexpr double to_seconds(Duration d) { return static_cast<double>(d.count()) * 1e-9; }

}  // namespace triad
