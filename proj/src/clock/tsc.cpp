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

#include "triad/clock/tsc.hpp"

#include <cmath>

#include "triad/sim/error.hpp"

namespace triad::clock {

namespace {

constexpr long double kNsPerSecond = 1e9L;

}  // namespace

Ticks tsc_read(const TscModel& model, ReferenceTime t) {
  const unsigned __int128 product = static_cast<unsigned __int128>(model.frequency_hz) * t.ns;
  if (model.scale == 1.0) {
    return static_cast<Ticks>(product / 1'000'000'000u) + model.offset;
  }
  const long double scaled =
      static_cast<long double>(product) * static_cast<long double>(model.scale) / kNsPerSecond;
  return static_cast<Ticks>(std::floor(scaled)) + model.offset;
}

TscTimeline::TscTimeline(TscModel initial) { segments_.push_back({ReferenceTime{}, initial}); }

const TscModel& TscTimeline::model_at(ReferenceTime t) const {
  for (auto it = segments_.rbegin(); it != segments_.rend(); ++it) {
    if (it->from <= t) return it->model;
  }
  return segments_.front().model;
}

Ticks TscTimeline::read(ReferenceTime t) const { return tsc_read(model_at(t), t); }

void TscTimeline::apply(ReferenceTime from, TscModel model) {
  if (!(model.scale > 0.0)) throw ConfigError("TSC scale must be positive");
  if (from < segments_.back().from) throw ConfigError("TSC change precedes the last change");
  if (from == segments_.back().from) {
    segments_.back().model = model;
    return;
  }
  segments_.push_back({from, model});
}

ReferenceTime TscTimeline::first_time_reaching(Ticks target, ReferenceTime from) const {
  for (std::size_t i = 0; i < segments_.size(); ++i) {
    const ReferenceTime seg_end =
        i + 1 < segments_.size() ? segments_[i + 1].from : ReferenceTime::max();
    if (seg_end <= from) continue;
    const ReferenceTime start = segments_[i].from > from ? segments_[i].from : from;
    const TscModel& m = segments_[i].model;
    if (tsc_read(m, start) >= target) return start;

    const long double rate = static_cast<long double>(m.frequency_hz) * m.scale;  // ticks per s
    const long double need = static_cast<long double>(target - m.offset);
    const long double guess = std::ceil(need * kNsPerSecond / rate);
    if (!(guess < static_cast<long double>(seg_end.ns))) continue;

    auto t = static_cast<std::uint64_t>(guess < static_cast<long double>(start.ns)
                                            ? static_cast<long double>(start.ns)
                                            : guess);
    while (t < seg_end.ns && tsc_read(m, ReferenceTime{t}) < target) ++t;
    while (t > start.ns && tsc_read(m, ReferenceTime{t - 1}) >= target) --t;
    if (t < seg_end.ns) return ReferenceTime{t};
  }
  return ReferenceTime::max();
}

Duration TscTimeline::time_to_advance(Ticks ticks, ReferenceTime from) const {
  const ReferenceTime reached = first_time_reaching(read(from) + ticks, from);
  if (reached == ReferenceTime::max()) return Duration::max();
  return reached - from;
}

}  // namespace triad::clock
