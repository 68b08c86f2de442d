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
#include <vector>

#include "triad/sim/time.hpp"

namespace triad::clock {

/// Default TSC frequency, as an OS would measure it at boot.
inline constexpr std::uint64_t kTestbedTscHz = 2'899'999'000;

/// Ground truth for one node's TimeStamp Counter.
struct TscModel {
  std::uint64_t frequency_hz = kTestbedTscHz;
  /// Tick shift applied by a hypervisor.
  Ticks offset = 0;
  /// Multiplier on the tick rate; 1.0 when honest.
  double scale = 1.0;

  friend bool operator==(const TscModel&, const TscModel&) = default;
};

/// floor(F_TSC * scale * t) + offset.
Ticks tsc_read(const TscModel& model, ReferenceTime t);

/// Piecewise TSC history of one node. Manipulations take effect at event
/// boundaries, so the history is a list of models each valid from an instant
/// until the next one.
class TscTimeline {
 public:
  explicit TscTimeline(TscModel initial = {});

  Ticks read(ReferenceTime t) const;
  const TscModel& model_at(ReferenceTime t) const;
  const TscModel& current() const { return segments_.back().model; }

  /// Installs `model` from `from` onwards. `from` must not precede the last
  /// change.
  void apply(ReferenceTime from, TscModel model);

  /// Earliest t >= from with read(t) >= target. Returns ReferenceTime::max()
  /// when the counter never gets there (it is bounded only by 2^64 ns).
  ReferenceTime first_time_reaching(Ticks target, ReferenceTime from) const;

  /// Reference time needed for the counter to advance by `ticks` starting at
  /// `from`.
  Duration time_to_advance(Ticks ticks, ReferenceTime from) const;

  std::size_t segment_count() const { return segments_.size(); }

 private:
  struct Segment {
    ReferenceTime from;
    TscModel model;
  };
  std::vector<Segment> segments_;
};

}  // namespace triad::clock
