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
#include <span>
#include <vector>

#include "triad/clock/monitor.hpp"
#include "triad/experiments/scenario.hpp"

namespace triad::experiments {

/// Condensed result of one seeded run.
struct RunDigest {
  std::uint64_t seed = 0;
  std::uint64_t event_digest = 0;
  std::uint64_t events = 0;
  std::vector<double> availability;
  std::uint64_t monotonic_violations = 0;
  std::uint64_t served = 0;

  friend bool operator==(const RunDigest&, const RunDigest&) = default;
};

/// Runs `scenario` once per seed, in order. Records are not kept.
std::vector<RunDigest> run_seeds_serial(const Scenario& scenario, std::span<const std::uint64_t> seeds);

/// Same results as run_seeds_serial, with runs spread over OpenMP threads.
std::vector<RunDigest> run_seeds_parallel(const Scenario& scenario, std::span<const std::uint64_t> seeds);

struct MonitorBatchResult {
  std::uint64_t windows = 0;
  std::uint64_t discrepancies = 0;
  std::uint64_t interrupted = 0;
  double mean_count = 0.0;

  friend bool operator==(const MonitorBatchResult&, const MonitorBatchResult&) = default;
};

/// Windows per independently seeded chunk; chunking fixes the random draws
/// each window sees regardless of thread count.
inline constexpr std::uint64_t kMonitorChunk = 4096;

/// Back-to-back uninterrupted windows over `tsc`, starting at t = 0.
MonitorBatchResult monitor_batch_serial(const clock::MonitorCounter& counter, const clock::TscTimeline& tsc,
                                        std::uint64_t windows, std::uint64_t seed);

/// Bit-identical to monitor_batch_serial.
MonitorBatchResult monitor_batch_parallel(const clock::MonitorCounter& counter, const clock::TscTimeline& tsc,
                                          std::uint64_t windows, std::uint64_t seed);

}  // namespace triad::experiments
