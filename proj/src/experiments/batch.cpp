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

#include "triad/experiments/batch.hpp"

#include <exception>

#include "triad/experiments/metrics.hpp"
#include "triad/experiments/simulation.hpp"
#include "triad/sim/rng.hpp"

namespace triad::experiments {

namespace {

RunDigest run_one(Scenario scenario, std::uint64_t seed) {
  scenario.seed = seed;
  const Trace trace = simulate(scenario, RunOptions{.keep_records = false});
  RunDigest d;
  d.seed = seed;
  d.event_digest = trace.event_digest;
  d.events = trace.events_dispatched;
  for (EntityId id = 1; id <= scenario.node_count(); ++id) d.availability.push_back(availability(trace, id));
  for (auto v : trace.monotonic_violations) d.monotonic_violations += v;
  for (auto v : trace.served_count) d.served += v;
  return d;
}

struct ChunkResult {
  std::uint64_t windows = 0;
  std::uint64_t discrepancies = 0;
  std::uint64_t interrupted = 0;
  long double count_sum = 0;
};

ChunkResult monitor_chunk(const clock::MonitorCounter& counter, const clock::TscTimeline& tsc,
                          std::uint64_t first, std::uint64_t last, std::uint64_t seed, std::uint64_t chunk) {
  sim::RngStream noise(sim::mix64(seed ^ sim::mix64(chunk)));
  ChunkResult r;
  // Honest windows are contiguous, so window k starts where k-1 ended; the
  // chunk start is located by advancing `first` windows from zero.
  ReferenceTime start = tsc.first_time_reaching(tsc.read(ReferenceTime{}) + static_cast<Ticks>(first) * counter.window_ticks,
                                                ReferenceTime{});
  for (std::uint64_t k = first; k < last; ++k) {
    const auto out = clock::monitor_window(counter, tsc, start, std::nullopt, noise);
    ++r.windows;
    if (out.verdict == clock::MonitorVerdict::Discrepancy) ++r.discrepancies;
    if (out.verdict == clock::MonitorVerdict::Interrupted) ++r.interrupted;
    r.count_sum += out.observed_count;
    start = out.window_end;
  }
  return r;
}

MonitorBatchResult reduce(const std::vector<ChunkResult>& chunks) {
  MonitorBatchResult out;
  long double sum = 0;
  for (const auto& c : chunks) {
    out.windows += c.windows;
    out.discrepancies += c.discrepancies;
    out.interrupted += c.interrupted;
    sum += c.count_sum;
  }
  out.mean_count = out.windows ? static_cast<double>(sum / out.windows) : 0.0;
  return out;
}

}  // namespace

std::vector<RunDigest> run_seeds_serial(const Scenario& scenario, std::span<const std::uint64_t> seeds) {
  std::vector<RunDigest> out;
  out.reserve(seeds.size());
  for (auto seed : seeds) out.push_back(run_one(scenario, seed));
  return out;
}

std::vector<RunDigest> run_seeds_parallel(const Scenario& scenario, std::span<const std::uint64_t> seeds) {
  scenario.validate();
  std::vector<RunDigest> out(seeds.size());
  std::exception_ptr failure;
  const auto n = static_cast<std::int64_t>(seeds.size());
#pragma omp parallel for schedule(dynamic, 1)
  for (std::int64_t i = 0; i < n; ++i) {
    try {
      out[i] = run_one(scenario, seeds[i]);
    } catch (...) {
#pragma omp critical
      if (!failure) failure = std::current_exception();
    }
  }
  if (failure) std::rethrow_exception(failure);
  return out;
}

MonitorBatchResult monitor_batch_serial(const clock::MonitorCounter& counter, const clock::TscTimeline& tsc,
                                        std::uint64_t windows, std::uint64_t seed) {
  const std::uint64_t chunks = (windows + kMonitorChunk - 1) / kMonitorChunk;
  std::vector<ChunkResult> results(chunks);
  for (std::uint64_t c = 0; c < chunks; ++c) {
    results[c] = monitor_chunk(counter, tsc, c * kMonitorChunk, std::min(windows, (c + 1) * kMonitorChunk), seed, c);
  }
  return reduce(results);
}

MonitorBatchResult monitor_batch_parallel(const clock::MonitorCounter& counter, const clock::TscTimeline& tsc,
                                          std::uint64_t windows, std::uint64_t seed) {
  const std::uint64_t chunks = (windows + kMonitorChunk - 1) / kMonitorChunk;
  std::vector<ChunkResult> results(chunks);
  const auto n = static_cast<std::int64_t>(chunks);
#pragma omp parallel for schedule(static)
  for (std::int64_t c = 0; c < n; ++c) {
    const auto cu = static_cast<std::uint64_t>(c);
    results[cu] = monitor_chunk(counter, tsc, cu * kMonitorChunk, std::min(windows, (cu + 1) * kMonitorChunk), seed, cu);
  }
  return reduce(results);
}

}  // namespace triad::experiments
