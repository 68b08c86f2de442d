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

#include "triad/experiments/export.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

#include "triad/sim/error.hpp"

namespace triad::experiments {

namespace fs = std::filesystem;

namespace {

std::string num(double v) {
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return ec == std::errc{} ? std::string(buf, end) : std::string("nan");
}

template <typename T>
std::string cell(const std::optional<T>& v) {
  if (!v) return {};
  if constexpr (std::is_same_v<T, Timestamp>) {
    return std::to_string(v->ns);
  } else {
    return std::to_string(v->count());
  }
}

const char* cause_name(DetectionCause c) {
  return c == DetectionCause::TscManipulation ? "tsc_manipulation" : "false_alarm";
}

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> out;
  std::string field;
  std::istringstream in(line);
  while (std::getline(in, field, ',')) out.push_back(field);
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

/// Rows of a CSV whose header must match `header` exactly.
std::vector<std::vector<std::string>> read_csv(const fs::path& file, const std::string& header) {
  std::ifstream in(file);
  if (!in) throw IoError("cannot open '" + file.string() + "'");
  std::string line;
  if (!std::getline(in, line) || line != header) {
    throw ValidationError(file.filename().string(), "expected header '" + header + "'");
  }
  const std::size_t columns = split(header).size();
  std::vector<std::vector<std::string>> rows;
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    auto row = split(line);
    if (row.size() != columns) {
      throw ValidationError(file.filename().string() + ":" + std::to_string(lineno),
                            "expected " + std::to_string(columns) + " columns");
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

std::int64_t to_i64(const std::string& s, const fs::path& file) {
  std::int64_t v = 0;
  auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || p != s.data() + s.size()) {
    throw ValidationError(file.filename().string(), "not an integer: '" + s + "'");
  }
  return v;
}

std::uint64_t to_u64(const std::string& s, const fs::path& file) {
  std::uint64_t v = 0;
  auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || p != s.data() + s.size()) {
    throw ValidationError(file.filename().string(), "not an unsigned integer: '" + s + "'");
  }
  return v;
}

double to_f64(const std::string& s, const fs::path& file) {
  double v = 0;
  auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || p != s.data() + s.size()) {
    throw ValidationError(file.filename().string(), "not a number: '" + s + "'");
  }
  return v;
}

std::optional<Timestamp> to_ts(const std::string& s, const fs::path& file) {
  if (s.empty()) return std::nullopt;
  return Timestamp{to_i64(s, file)};
}

protocol::NodeState to_state(const std::string& s, const fs::path& file) {
  for (std::size_t i = 0; i < protocol::kNodeStateCount; ++i) {
    const auto st = static_cast<protocol::NodeState>(i);
    if (s == protocol::to_string(st)) return st;
  }
  throw ValidationError(file.filename().string(), "unknown state '" + s + "'");
}

void write_file(const fs::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write '" + path.string() + "'");
  out << content;
  out.close();
  if (!out) throw IoError("failed writing '" + path.string() + "'");
}

constexpr const char* kDriftHeader = "t_ref_ns,node,node_time_ns,drift_ns,served_ns,epoch";
constexpr const char* kStatesHeader = "t_ref_ns,node,state";
constexpr const char* kAexHeader = "t_ref_ns,node,cum_aex";
constexpr const char* kTaHeader = "t_ref_ns,node,cum_ta_ref";
constexpr const char* kHistHeader = "node,bin_start_ns,bin_width_ns,count";
constexpr const char* kJumpsHeader =
    "t_ref_ns,node,source,pre_ns,post_ns,payload_ns,local_before_aex_ns,adopted,magnitude_ns";
constexpr const char* kCalibHeader =
    "t_ref_ns,node,f_calib_hz,raw_slope_hz,true_tsc_hz,valid_samples,total_samples,batches";
constexpr const char* kDetectHeader = "t_ref_ns,node,cause,observed_count";

}  // namespace

std::map<std::string, std::string> render_csv(const Trace& trace) {
  std::string drift = std::string(kDriftHeader) + "\n";
  std::string states = std::string(kStatesHeader) + "\n";
  std::string aex = std::string(kAexHeader) + "\n";
  std::string ta = std::string(kTaHeader) + "\n";
  for (const auto& r : trace.records) {
    const std::string prefix = std::to_string(r.t.ns) + "," + std::to_string(r.node) + ",";
    drift += prefix + cell(r.node_time) + "," + cell(r.drift()) + "," + cell(r.served) + "," +
             std::to_string(r.epoch) + "\n";
    states += prefix + protocol::to_string(r.state) + "\n";
    aex += prefix + std::to_string(r.cum_aex) + "\n";
    ta += prefix + std::to_string(r.cum_ta_ref) + "\n";
  }

  std::string hist = std::string(kHistHeader) + "\n";
  for (const auto& [node, bins] : trace.aex_delay_hist) {
    for (const auto& [start, count] : bins) {
      hist += std::to_string(node) + "," + std::to_string(start) + ",1000000," + std::to_string(count) + "\n";
    }
  }

  std::string jumps = std::string(kJumpsHeader) + "\n";
  for (const auto& j : trace.jumps) {
    jumps += std::to_string(j.t.ns) + "," + std::to_string(j.node) + "," + std::to_string(j.jump.source) + "," +
             cell(j.jump.pre) + "," + std::to_string(j.jump.post.ns) + "," + std::to_string(j.jump.payload.ns) +
             "," + cell(j.jump.local_before_aex) + "," + (j.jump.adopted ? "1" : "0") + "," +
             cell(j.jump.magnitude()) + "\n";
  }

  std::string calib = std::string(kCalibHeader) + "\n";
  for (const auto& c : trace.calibrations) {
    calib += std::to_string(c.t.ns) + "," + std::to_string(c.node) + "," + num(c.result.f_calib) + "," +
             num(c.result.raw_slope_hz) + "," + num(c.true_tsc_hz) + "," + std::to_string(c.result.valid_samples) +
             "," + std::to_string(c.result.total_samples) + "," + std::to_string(c.result.batches) + "\n";
  }

  std::string detect = std::string(kDetectHeader) + "\n";
  for (const auto& d : trace.detections) {
    detect += std::to_string(d.t.ns) + "," + std::to_string(d.node) + "," + cause_name(d.cause) + "," +
              num(d.observed_count) + "\n";
  }

  return {{"drift.csv", std::move(drift)},         {"states.csv", std::move(states)},
          {"aex.csv", std::move(aex)},             {"ta.csv", std::move(ta)},
          {"aex_delays_hist.csv", std::move(hist)}, {"jumps.csv", std::move(jumps)},
          {"calibration.csv", std::move(calib)},   {"detections.csv", std::move(detect)}};
}

void export_trace(const Trace& trace, const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw IoError("cannot create '" + dir.string() + "': " + ec.message());
  for (const auto& [name, content] : render_csv(trace)) write_file(dir / name, content);
  write_file(dir / "scenario.json", scenario_to_json(trace.scenario).dump(2) + "\n");
  write_file(dir / "summary.json", summary_to_json(summarize(trace)).dump(2) + "\n");
}

Trace load_trace(const fs::path& dir) {
  Trace trace;
  {
    std::ifstream in(dir / "scenario.json");
    if (!in) throw IoError("cannot open '" + (dir / "scenario.json").string() + "'");
    nlohmann::json doc;
    try {
      doc = nlohmann::json::parse(in);
    } catch (const nlohmann::json::parse_error& e) {
      throw ValidationError("scenario.json", e.what());
    }
    trace.scenario = scenario_from_json(doc);
  }
  trace.horizon = at(trace.scenario.horizon);
  const std::size_t n = trace.scenario.node_count();
  trace.state_times.assign(n, StateTimes{});
  trace.aex_counts.assign(n, 0);
  trace.ta_references.assign(n, 0);
  trace.peer_untaints.assign(n, 0);
  trace.monotonic_violations.assign(n, 0);
  trace.served_count.assign(n, 0);

  const fs::path drift_file = dir / "drift.csv";
  const fs::path states_file = dir / "states.csv";
  const fs::path aex_file = dir / "aex.csv";
  const fs::path ta_file = dir / "ta.csv";
  const auto drift = read_csv(drift_file, kDriftHeader);
  const auto states = read_csv(states_file, kStatesHeader);
  const auto aex = read_csv(aex_file, kAexHeader);
  const auto ta = read_csv(ta_file, kTaHeader);
  if (states.size() != drift.size() || aex.size() != drift.size() || ta.size() != drift.size()) {
    throw ValidationError(dir.string(), "drift/states/aex/ta row counts differ");
  }

  const auto node_of = [&](const std::string& s, const fs::path& file) {
    const auto id = to_u64(s, file);
    if (id < 1 || id > n) throw ValidationError(file.filename().string(), "unknown node " + s);
    return static_cast<EntityId>(id);
  };

  std::vector<std::optional<Timestamp>> last_served(n);
  std::vector<std::optional<ScenarioRecord>> last(n);
  for (std::size_t i = 0; i < drift.size(); ++i) {
    ScenarioRecord r;
    r.t = ReferenceTime{to_u64(drift[i][0], drift_file)};
    r.node = node_of(drift[i][1], drift_file);
    r.node_time = to_ts(drift[i][2], drift_file);
    r.served = to_ts(drift[i][4], drift_file);
    r.epoch = static_cast<std::uint32_t>(to_u64(drift[i][5], drift_file));
    r.state = to_state(states[i][2], states_file);
    r.cum_aex = to_u64(aex[i][2], aex_file);
    r.cum_ta_ref = to_u64(ta[i][2], ta_file);
    const std::size_t k = r.node - 1;

    if (r.served) {
      ++trace.served_count[k];
      if (last_served[k] && *r.served <= *last_served[k]) ++trace.monotonic_violations[k];
      last_served[k] = r.served;
    }
    if (last[k]) {
      trace.state_times[k][static_cast<std::size_t>(last[k]->state)] += r.t - last[k]->t;
      if (last[k]->state != r.state) trace.transitions.push_back({r.t, r.node, last[k]->state, r.state});
    } else {
      trace.transitions.push_back({r.t, r.node, std::nullopt, r.state});
    }
    trace.aex_counts[k] = r.cum_aex;
    trace.ta_references[k] = r.cum_ta_ref;
    last[k] = r;
    trace.records.push_back(r);
  }
  for (std::size_t k = 0; k < n; ++k) {
    if (last[k]) trace.state_times[k][static_cast<std::size_t>(last[k]->state)] += trace.horizon - last[k]->t;
  }

  const fs::path jumps_file = dir / "jumps.csv";
  for (const auto& row : read_csv(jumps_file, kJumpsHeader)) {
    JumpRecord j;
    j.t = ReferenceTime{to_u64(row[0], jumps_file)};
    j.node = node_of(row[1], jumps_file);
    j.jump.source = static_cast<EntityId>(to_u64(row[2], jumps_file));
    j.jump.pre = to_ts(row[3], jumps_file);
    j.jump.post = Timestamp{to_i64(row[4], jumps_file)};
    j.jump.payload = Timestamp{to_i64(row[5], jumps_file)};
    j.jump.local_before_aex = to_ts(row[6], jumps_file);
    j.jump.adopted = row[7] == "1";
    if (j.jump.source != kTimeAuthority) ++trace.peer_untaints[j.node - 1];
    trace.jumps.push_back(j);
  }

  const fs::path calib_file = dir / "calibration.csv";
  for (const auto& row : read_csv(calib_file, kCalibHeader)) {
    CalibrationRecord c;
    c.t = ReferenceTime{to_u64(row[0], calib_file)};
    c.node = node_of(row[1], calib_file);
    c.result.f_calib = to_f64(row[2], calib_file);
    c.result.raw_slope_hz = to_f64(row[3], calib_file);
    c.true_tsc_hz = to_f64(row[4], calib_file);
    c.result.valid_samples = to_u64(row[5], calib_file);
    c.result.total_samples = to_u64(row[6], calib_file);
    c.result.batches = static_cast<std::uint32_t>(to_u64(row[7], calib_file));
    trace.calibrations.push_back(c);
  }

  const fs::path hist_file = dir / "aex_delays_hist.csv";
  for (const auto& row : read_csv(hist_file, kHistHeader)) {
    trace.aex_delay_hist[node_of(row[0], hist_file)][to_i64(row[1], hist_file)] += to_u64(row[3], hist_file);
  }

  const fs::path detect_file = dir / "detections.csv";
  if (fs::exists(detect_file)) {
    for (const auto& row : read_csv(detect_file, kDetectHeader)) {
      MonitorDetection d;
      d.t = ReferenceTime{to_u64(row[0], detect_file)};
      d.node = node_of(row[1], detect_file);
      d.cause = row[2] == "false_alarm" ? DetectionCause::FalseAlarm : DetectionCause::TscManipulation;
      d.observed_count = to_f64(row[3], detect_file);
      trace.detections.push_back(d);
    }
  }
  return trace;
}

MetricsSummary summarize_directory(const fs::path& dir) { return summarize(load_trace(dir)); }

}  // namespace triad::experiments
