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
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "triad/experiments/trace.hpp"

namespace triad::experiments {

struct DriftPoint {
  ReferenceTime t;
  Duration drift{};
};

/// Least-squares slope of drift against reference time, in ppm. Throws
/// InsufficientData for fewer than two points or a single instant.
double drift_slope_ppm(std::span<const DriftPoint> points);

/// Drift rate of `node` over [from, to]. Throws SegmentationError when the
/// records in the range straddle a re-anchor or calibration, and
/// InsufficientData when fewer than two of them carry a clock reading.
double drift_rate(const Trace& trace, EntityId node, ReferenceTime from, ReferenceTime to);

struct DriftSegment {
  EntityId node = 1;
  std::uint32_t epoch = 0;
  ReferenceTime start;
  ReferenceTime end;
  std::size_t points = 0;
  double rate_ppm = 0.0;
};

/// Maximal jump-free segments of the node's records with at least
/// `min_points` readings.
std::vector<DriftSegment> drift_segments(const Trace& trace, EntityId node, std::size_t min_points = 2);

/// Fraction of the horizon the node spent in OK.
double availability(const Trace& trace, EntityId node);

struct HistogramBin {
  Duration lo{};
  Duration hi{};
  std::uint64_t count = 0;
};

/// Sojourn times in `state`, in decade bins from 1 us (the first bin also
/// holds shorter stays, the last anything from 10^4 s up).
std::vector<HistogramBin> state_duration_histogram(const Trace& trace, EntityId node, protocol::NodeState state);

struct NodeSummary {
  EntityId node = 1;
  double availability = 0.0;
  StateTimes state_times{};
  std::uint64_t aex = 0;
  std::uint64_t ta_references = 0;
  std::uint64_t peer_untaints = 0;
  std::uint64_t served = 0;
  std::uint64_t monotonic_violations = 0;
  std::uint64_t detections = 0;
  std::optional<double> f_calib_hz;
  std::optional<double> true_tsc_hz;
  std::optional<double> median_drift_rate_ppm;
  std::optional<double> min_drift_rate_ppm;
  std::optional<double> max_drift_rate_ppm;
  std::optional<Duration> final_drift;
  std::optional<Duration> max_abs_drift;
  std::size_t jumps = 0;
  std::optional<Duration> largest_jump;
  std::vector<std::vector<HistogramBin>> state_histograms;
};

struct MetricsSummary {
  std::string scenario;
  std::uint64_t seed = 0;
  ReferenceTime horizon{};
  std::vector<NodeSummary> nodes;
  std::vector<JumpRecord> jumps;
};

MetricsSummary summarize(const Trace& trace);
nlohmann::json summary_to_json(const MetricsSummary& summary);

}  // namespace triad::experiments
