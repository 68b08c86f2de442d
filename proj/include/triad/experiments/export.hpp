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

#include <filesystem>
#include <map>
#include <string>

#include "triad/experiments/metrics.hpp"
#include "triad/experiments/trace.hpp"

namespace triad::experiments {

/// CSV files of a trace, keyed by file name. Every time column is integer
/// nanoseconds; absent values are empty cells.
///
///   drift.csv            t_ref_ns,node,node_time_ns,drift_ns,served_ns,epoch
///   states.csv           t_ref_ns,node,state
///   aex.csv              t_ref_ns,node,cum_aex
///   ta.csv               t_ref_ns,node,cum_ta_ref
///   aex_delays_hist.csv  node,bin_start_ns,bin_width_ns,count
///   jumps.csv            t_ref_ns,node,source,pre_ns,post_ns,payload_ns,local_before_aex_ns,adopted,magnitude_ns
///   calibration.csv      t_ref_ns,node,f_calib_hz,raw_slope_hz,true_tsc_hz,valid_samples,total_samples,batches
///   detections.csv       t_ref_ns,node,cause,observed_count
///
/// drift/states/aex/ta hold one row per ScenarioRecord in the same order.
std::map<std::string, std::string> render_csv(const Trace& trace);

/// Writes the CSVs plus scenario.json (resolved scenario) and summary.json.
/// Throws IoError naming the file on failure.
void export_trace(const Trace& trace, const std::filesystem::path& dir);

/// Rebuilds a trace from an exported directory (records, jumps,
/// calibrations, detections, histogram, state times and counters).
/// Throws IoError or ValidationError.
Trace load_trace(const std::filesystem::path& dir);

MetricsSummary summarize_directory(const std::filesystem::path& dir);

}  // namespace triad::experiments
