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

#include "triad/experiments/metrics.hpp"

#include <algorithm>
#include <cmath>

#include "triad/sim/error.hpp"

namespace triad::experiments {

double drift_slope_ppm(std::span<const DriftPoint> points) {
  if (points.size() < 2) throw InsufficientData("drift rate needs at least two points");
  // Center on the first point so the sums stay small and exact-ish.
  const std::int64_t t0 = static_cast<std::int64_t>(points.front().t.ns);
  const std::int64_t d0 = points.front().drift.count();
  long double sx = 0, sy = 0;
  for (const auto& p : points) {
    sx += static_cast<long double>(static_cast<std::int64_t>(p.t.ns) - t0);
    sy += static_cast<long double>(p.drift.count() - d0);
  }
  const long double n = static_cast<long double>(points.size());
  const long double mx = sx / n, my = sy / n;
  long double sxx = 0, sxy = 0;
  for (const auto& p : points) {
    const long double dx = static_cast<long double>(static_cast<std::int64_t>(p.t.ns) - t0) - mx;
    const long double dy = static_cast<long double>(p.drift.count() - d0) - my;
    sxx += dx * dx;
    sxy += dx * dy;
  }
  if (sxx == 0) throw InsufficientData("drift points share a single instant");
  return static_cast<double>(sxy / sxx * 1e6L);
}

double drift_rate(const Trace& trace, EntityId node, ReferenceTime from, ReferenceTime to) {
  std::vector<DriftPoint> points;
  std::optional<std::uint32_t> epoch;
  for (const auto& r : trace.records) {
    if (r.node != node || r.t < from || r.t > to) continue;
    if (epoch && r.epoch != *epoch) {
      throw SegmentationError("drift segment of node " + std::to_string(node) + " crosses a re-anchor at " +
                              std::to_string(r.t.ns) + "ns");
    }
    epoch = r.epoch;
    if (auto d = r.drift()) points.push_back({r.t, *d});
  }
  return drift_slope_ppm(points);
}

std::vector<DriftSegment> drift_segments(const Trace& trace, EntityId node, std::size_t min_points) {
  std::vector<DriftSegment> out;
  std::vector<DriftPoint> points;
  std::optional<std::uint32_t> epoch;
  const auto flush = [&] {
    if (points.size() >= std::max<std::size_t>(min_points, 2) && points.front().t != points.back().t) {
      out.push_back({node, *epoch, points.front().t, points.back().t, points.size(), drift_slope_ppm(points)});
    }
    points.clear();
  };
  for (const auto& r : trace.records) {
    if (r.node != node) continue;
    if (epoch && r.epoch != *epoch) flush();
    epoch = r.epoch;
    if (auto d = r.drift()) points.push_back({r.t, *d});
  }
  if (epoch) flush();
  return out;
}

double availability(const Trace& trace, EntityId node) {
  if (node < 1 || node > trace.state_times.size()) throw ConfigError("unknown node " + std::to_string(node));
  if (trace.horizon.ns == 0) return 0.0;
  const Duration ok = trace.state_times[node - 1][static_cast<std::size_t>(protocol::NodeState::OK)];
  return static_cast<double>(ok.count()) / static_cast<double>(trace.horizon.ns);
}

std::vector<HistogramBin> state_duration_histogram(const Trace& trace, EntityId node, protocol::NodeState state) {
  std::vector<HistogramBin> bins;
  Duration lo{0};
  Duration hi{1'000};
  for (int i = 0; i < 11; ++i) {
    bins.push_back({lo, hi, 0});
    lo = hi;
    hi = hi * 10;
  }
  bins.back().hi = Duration::max();

  std::optional<ReferenceTime> entered;
  const auto add = [&](Duration d) {
    for (auto& b : bins) {
      if (d < b.hi) {
        ++b.count;
        return;
      }
    }
  };
  for (const auto& tr : trace.transitions) {
    if (tr.node != node) continue;
    if (entered && tr.from == state) {
      add(tr.t - *entered);
      entered.reset();
    }
    if (tr.to == state) entered = tr.t;
  }
  if (entered) add(trace.horizon - *entered);
  return bins;
}

MetricsSummary summarize(const Trace& trace) {
  MetricsSummary s;
  s.scenario = trace.scenario.name;
  s.seed = trace.scenario.seed;
  s.horizon = trace.horizon;
  s.jumps = trace.jumps;
  const std::size_t n = trace.state_times.size();
  for (EntityId id = 1; id <= n; ++id) {
    NodeSummary ns;
    ns.node = id;
    ns.availability = availability(trace, id);
    ns.state_times = trace.state_times[id - 1];
    ns.aex = trace.aex_counts[id - 1];
    ns.ta_references = trace.ta_references[id - 1];
    ns.peer_untaints = trace.peer_untaints[id - 1];
    ns.served = trace.served_count[id - 1];
    ns.monotonic_violations = trace.monotonic_violations[id - 1];
    ns.detections = static_cast<std::uint64_t>(
        std::count_if(trace.detections.begin(), trace.detections.end(), [&](const auto& d) { return d.node == id; }));
    for (const auto& c : trace.calibrations) {
      if (c.node != id) continue;
      ns.f_calib_hz = c.result.f_calib;
      ns.true_tsc_hz = c.true_tsc_hz;
    }

    auto segments = drift_segments(trace, id, 5);
    if (!segments.empty()) {
      std::vector<double> rates;
      for (const auto& seg : segments) rates.push_back(seg.rate_ppm);
      std::sort(rates.begin(), rates.end());
      ns.min_drift_rate_ppm = rates.front();
      ns.max_drift_rate_ppm = rates.back();
      const std::size_t m = rates.size() / 2;
      ns.median_drift_rate_ppm = rates.size() % 2 ? rates[m] : 0.5 * (rates[m - 1] + rates[m]);
    }
    for (const auto& r : trace.records) {
      if (r.node != id) continue;
      if (auto d = r.drift()) {
        ns.final_drift = *d;
        const Duration a = d->count() < 0 ? -*d : *d;
        if (!ns.max_abs_drift || a > *ns.max_abs_drift) ns.max_abs_drift = a;
      }
    }
    for (const auto& j : trace.jumps) {
      if (j.node != id) continue;
      ++ns.jumps;
      if (auto m = j.jump.magnitude()) {
        const Duration a = m->count() < 0 ? -*m : *m;
        if (!ns.largest_jump || a > (ns.largest_jump->count() < 0 ? -*ns.largest_jump : *ns.largest_jump)) {
          ns.largest_jump = *m;
        }
      }
    }
    for (std::size_t st = 0; st < protocol::kNodeStateCount; ++st) {
      ns.state_histograms.push_back(state_duration_histogram(trace, id, static_cast<protocol::NodeState>(st)));
    }
    s.nodes.push_back(std::move(ns));
  }
  return s;
}

nlohmann::json summary_to_json(const MetricsSummary& s) {
  using nlohmann::json;
  const auto opt = [](const auto& v) -> json {
    if (!v) return nullptr;
    if constexpr (std::is_same_v<std::decay_t<decltype(*v)>, Duration>) {
      return v->count();
    } else {
      return *v;
    }
  };
  json nodes = json::array();
  for (const auto& n : s.nodes) {
    json states = json::object();
    json hist = json::object();
    for (std::size_t st = 0; st < protocol::kNodeStateCount; ++st) {
      const char* name = protocol::to_string(static_cast<protocol::NodeState>(st));
      states[name] = n.state_times[st].count();
      json bins = json::array();
      for (const auto& b : n.state_histograms[st]) {
        if (b.count == 0) continue;
        bins.push_back({{"lo_ns", b.lo.count()},
                        {"hi_ns", b.hi == Duration::max() ? json(nullptr) : json(b.hi.count())},
                        {"count", b.count}});
      }
      hist[name] = bins;
    }
    nodes.push_back({{"node", n.node},
                     {"availability", n.availability},
                     {"state_time_ns", states},
                     {"state_duration_histogram", hist},
                     {"aex", n.aex},
                     {"ta_references", n.ta_references},
                     {"peer_untaints", n.peer_untaints},
                     {"served", n.served},
                     {"monotonic_violations", n.monotonic_violations},
                     {"monitor_detections", n.detections},
                     {"f_calib_hz", opt(n.f_calib_hz)},
                     {"true_tsc_hz", opt(n.true_tsc_hz)},
                     {"drift_rate_ppm", {{"median", opt(n.median_drift_rate_ppm)},
                                         {"min", opt(n.min_drift_rate_ppm)},
                                         {"max", opt(n.max_drift_rate_ppm)}}},
                     {"final_drift_ns", opt(n.final_drift)},
                     {"max_abs_drift_ns", opt(n.max_abs_drift)},
                     {"jumps", n.jumps},
                     {"largest_jump_ns", opt(n.largest_jump)}});
  }
  json jumps = json::array();
  for (const auto& j : s.jumps) {
    const auto m = j.jump.magnitude();
    jumps.push_back({{"t_ref_ns", j.t.ns},
                     {"node", j.node},
                     {"source", j.jump.source},
                     {"adopted", j.jump.adopted},
                     {"magnitude_ns", m ? json(m->count()) : json(nullptr)}});
  }
  return {{"scenario", s.scenario},
          {"seed", s.seed},
          {"horizon_ns", s.horizon.ns},
          {"nodes", nodes},
          {"jumps", jumps}};
}

}  // namespace triad::experiments
