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

#include "triad/clock/monitor.hpp"

#include <cmath>

#include "triad/sim/error.hpp"

namespace triad::clock {

void MonitorCounter::validate() const {
  if (!(expected_count > 0.0)) throw ConfigError("monitor expected_count must be positive");
  if (window_ticks <= 0) throw ConfigError("monitor window_ticks must be positive");
  if (!(core_frequency_hz > 0.0)) throw ConfigError("monitor core frequency must be positive");
  if (noise_std < 0.0) throw ConfigError("monitor noise_std is negative");
  if (tolerance < 3.0 * noise_std) throw ConfigError("monitor tolerance must be at least 3 * noise_std");
  if (outlier_probability < 0.0 || outlier_probability > 1.0)
    throw ConfigError("monitor outlier_probability outside [0, 1]");
  if (core_frequency_scale != 1.0 && !allow_core_frequency_attack)
    throw ConfigError("core frequency attacks are disabled for this monitor");
  if (!(core_frequency_scale > 0.0)) throw ConfigError("core frequency scale must be positive");
}

double MonitorCounter::false_alarm_probability() const {
  auto tail = [&](double stddev) {
    if (stddev <= 0.0) return 0.0;
    return std::erfc(tolerance / (stddev * std::sqrt(2.0)));
  };
  return (1.0 - outlier_probability) * tail(noise_std) + outlier_probability * tail(outlier_std);
}

const char* to_string(MonitorVerdict verdict) {
  switch (verdict) {
    case MonitorVerdict::Ok: return "ok";
    case MonitorVerdict::Discrepancy: return "discrepancy";
    case MonitorVerdict::Interrupted: return "interrupted";
  }
  return "?";
}

double draw_count_noise(const MonitorCounter& counter, sim::RngStream& noise) {
  const bool outlier = counter.outlier_probability > 0.0 && noise.bernoulli(counter.outlier_probability);
  return noise.normal(0.0, outlier ? counter.outlier_std : counter.noise_std);
}

MonitorOutcome monitor_window(const MonitorCounter& counter, const TscTimeline& tsc,
                              ReferenceTime window_start, std::optional<ReferenceTime> interrupt_at,
                              sim::RngStream& noise) {
  MonitorOutcome outcome;
  const Ticks start_ticks = tsc.read(window_start);
  outcome.window_end = tsc.first_time_reaching(start_ticks + counter.window_ticks, window_start);
  if (interrupt_at && *interrupt_at >= window_start && *interrupt_at < outcome.window_end) {
    outcome.verdict = MonitorVerdict::Interrupted;
    return outcome;
  }
  const double elapsed_s = to_seconds(outcome.window_end - window_start);
  const double core_scale = counter.allow_core_frequency_attack ? counter.core_frequency_scale : 1.0;
  const double loop_count = counter.core_frequency_hz * core_scale * elapsed_s;
  outcome.observed_count = std::round(loop_count + draw_count_noise(counter, noise));
  outcome.verdict = std::abs(outcome.observed_count - counter.expected_count) > counter.tolerance
                        ? MonitorVerdict::Discrepancy
                        : MonitorVerdict::Ok;
  return outcome;
}

}  // namespace triad::clock
