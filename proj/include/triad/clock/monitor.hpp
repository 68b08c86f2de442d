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
#include <optional>

#include "triad/clock/tsc.hpp"
#include "triad/sim/rng.hpp"

namespace triad::clock {

/// The in-enclave monitoring thread: it counts INC instructions until the TSC
/// has advanced by `window_ticks` and compares the count with its calibrated
/// expectation.
struct MonitorCounter {
  /// Counting-loop iterations per reference second on the pinned core.
  double core_frequency_hz = 632'182.0 * static_cast<double>(kTestbedTscHz) / 15e6;
  Ticks window_ticks = 15'000'000;
  double expected_count = 632'182.0;
  double noise_std = 2.9;
  double tolerance = 50.0;
  /// Heavy-tail knob: with this probability a window's jitter is drawn from
  /// N(0, outlier_std) instead of N(0, noise_std).
  double outlier_probability = 0.0;
  double outlier_std = 5'000.0;
  /// Monitoring-core frequency is outside the attack surface unless enabled.
  bool allow_core_frequency_attack = false;
  double core_frequency_scale = 1.0;

  /// Recomputes expected_count for a TSC ticking at `tsc_hz` (what the node's
  /// monitor calibration measures).
  void calibrate(double tsc_hz) {
    expected_count = core_frequency_hz * static_cast<double>(window_ticks) / tsc_hz;
  }

  /// Throws ConfigError when expected_count <= 0 or tolerance < 3 * noise_std,
  /// or when a core-frequency change is set without enabling it.
  void validate() const;

  /// Probability that one honest, uninterrupted window is flagged.
  double false_alarm_probability() const;
};

enum class MonitorVerdict : std::uint8_t { Ok, Discrepancy, Interrupted };

const char* to_string(MonitorVerdict verdict);

struct MonitorOutcome {
  MonitorVerdict verdict = MonitorVerdict::Interrupted;
  double observed_count = 0.0;
  ReferenceTime window_end{};
};

/// Runs one window starting at `window_start` over the node's TSC history.
/// The loop runs for however much reference time the TSC needs to advance by
/// window_ticks, so the count scales with that duration relative to an honest
/// window. `interrupt_at` is the next AEX on the monitoring thread; if it
/// falls inside the window the window is discarded without a verdict.
MonitorOutcome monitor_window(const MonitorCounter& counter, const TscTimeline& tsc,
                              ReferenceTime window_start, std::optional<ReferenceTime> interrupt_at,
                              sim::RngStream& noise);

/// Draws one window's count jitter (gaussian with the configured outlier mix).
double draw_count_noise(const MonitorCounter& counter, sim::RngStream& noise);

}  // namespace triad::clock
