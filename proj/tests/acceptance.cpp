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

// Acceptance suite: one PASS/FAIL line per criterion, exit status 1 if any
// criterion fails.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <functional>
#include <map>
#include <string>
#include <vector>

#include "oracles.hpp"
#include "triad/clock/monitor.hpp"
#include "triad/experiments/batch.hpp"
#include "triad/experiments/builtins.hpp"
#include "triad/experiments/export.hpp"
#include "triad/experiments/metrics.hpp"
#include "triad/experiments/simulation.hpp"
#include "triad/protocol/calibration.hpp"
#include "triad/sim/rng.hpp"

using namespace triad;
using namespace triad::experiments;
using protocol::NodeState;
using namespace std::chrono_literals;

namespace {

// Tolerances.
constexpr double kCalibRatioTol = 0.002;          // A1, A2: relative error of F_calib / F_TSC
constexpr double kFPlusDriftPpm = -90'909.0;      // A1: F_TSC / (1.1 F_TSC) - 1
constexpr double kFPlusDriftTolPpm = 2'000.0;     // A1: +-2 ms/s
constexpr double kFMinusDriftPpm = 111'111.0;     // A2: F_TSC / (0.9 F_TSC) - 1
constexpr double kFMinusDriftTolPpm = 3'000.0;    // A2: +-3 ms/s
constexpr double kHonestEnvelopePpm = 250.0;      // A3, A4: fault-free drift-rate envelope
constexpr Duration kJumpOnsetWindow = 10s;        // A3
constexpr Duration kSwitchTime = 104s;            // A3
constexpr Duration kHonestDriftFloor = -10ms;     // A4: honest drift never approaches -91 ms/s
constexpr double kAvailTriadLike = 0.98;          // A5 (strict >)
constexpr double kAvailLowAex = 0.999;            // A5 (>=)
constexpr Duration kMaxOneWay = 80us;             // A6: builtin link base 20 us + jitter <= 60 us
constexpr double kPullFraction = 0.1;             // A6: final gap to node 3 vs node 3's drift
constexpr int kSeeds = 100;                       // A7
constexpr double kScale = 1.01;                   // A8
constexpr std::uint64_t kHonestWindows = 10'000;  // A8
constexpr double kFalseAlarmRate = 0.01;          // A8
constexpr int kFuzzSets = 1000;                   // A9
constexpr long double kOracleRelTol = 1e-9L;      // A9
constexpr Duration kResetEps = 100us;             // A11: |drift| after a reset (one link delay)
constexpr int kResetRatio = 10;                   // A11: |drift| before a reset >= ratio * eps

constexpr double kTscHz = 2'899'999'000.0;

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

std::map<std::string, Trace>& cache() {
  static std::map<std::string, Trace> traces;
  return traces;
}

const Trace& builtin_trace(const std::string& name) {
  auto it = cache().find(name);
  if (it == cache().end()) it = cache().emplace(name, simulate(builtin_scenario(name))).first;
  return it->second;
}

double median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const std::size_t m = v.size() / 2;
  return v.size() % 2 ? v[m] : 0.5 * (v[m - 1] + v[m]);
}

std::vector<double> segment_rates(const Trace& t, EntityId node, ReferenceTime from, ReferenceTime to) {
  std::vector<double> out;
  for (const auto& seg : drift_segments(t, node, 5)) {
    if (seg.start >= from && seg.end <= to) out.push_back(seg.rate_ppm);
  }
  return out;
}

/// Drift rates of the node's jump-free stretches, clipped to [from, to).
std::vector<double> clipped_rates(const Trace& t, EntityId node, ReferenceTime from, ReferenceTime to) {
  std::map<std::uint32_t, std::vector<DriftPoint>> by_epoch;
  for (const auto& r : t.records) {
    if (r.node == node && r.t >= from && r.t < to && r.drift()) by_epoch[r.epoch].push_back({r.t, *r.drift()});
  }
  std::vector<double> out;
  for (const auto& [epoch, points] : by_epoch) {
    if (points.size() >= 5) out.push_back(drift_slope_ppm(points));
  }
  return out;
}

double f_calib_of(const Trace& t, EntityId node) {
  for (const auto& c : t.calibrations) {
    if (c.node == node) return c.result.f_calib;
  }
  return 0.0;
}

Outcome calibration_math(const std::string& scenario, double ratio, double drift_ppm, double drift_tol) {
  const Trace& t = builtin_trace(scenario);
  const double got_ratio = f_calib_of(t, 3) / kTscHz;
  const auto rates = segment_rates(t, 3, {}, t.horizon);
  if (rates.empty()) return {false, "attacker has no drift segments"};
  const double rate = median(rates);
  const bool ok = std::abs(got_ratio / ratio - 1.0) <= kCalibRatioTol && std::abs(rate - drift_ppm) <= drift_tol;
  return {ok, fmt("F_calib/F_TSC=%.6f (want %.1f +-%.1f%%), attacker drift %.0f ppm (want %.0f +-%.0f)", got_ratio,
                  ratio, kCalibRatioTol * 100, rate, drift_ppm, drift_tol)};
}

Outcome a1() { return calibration_math("f_plus_all_aex", 1.1, kFPlusDriftPpm, kFPlusDriftTolPpm); }
Outcome a2() { return calibration_math("f_minus_switch", 0.9, kFMinusDriftPpm, kFMinusDriftTolPpm); }

Outcome a3() {
  const Trace& t = builtin_trace("f_minus_switch");
  const ReferenceTime sw = at(kSwitchTime);
  std::string detail;
  bool ok = true;
  for (EntityId id : {EntityId{1}, EntityId{2}}) {
    const auto pre = clipped_rates(t, id, {}, sw);
    double worst = 0.0;
    for (double r : pre) worst = std::max(worst, std::abs(r));
    if (pre.empty() || worst > kHonestEnvelopePpm) ok = false;

    std::vector<const JumpRecord*> from3;
    for (const auto& j : t.jumps) {
      if (j.node == id && j.t >= sw && j.jump.source == 3 && j.jump.adopted) from3.push_back(&j);
    }
    const bool onset = !from3.empty() && from3.front()->t - sw <= kJumpOnsetWindow &&
                       from3.front()->jump.magnitude().value_or(0ns) > 0ns;
    // Growth: the drift each adopted jump lands on keeps rising.
    bool growing = from3.size() >= 2;
    for (std::size_t i = 1; i < from3.size(); ++i) {
      growing &= (from3[i]->jump.post - from3[i]->t) > (from3[i - 1]->jump.post - from3[i - 1]->t);
    }
    std::optional<Duration> final_drift;
    for (const auto& r : t.records) {
      if (r.node == id && r.drift()) final_drift = r.drift();
    }
    const bool positive = final_drift && *final_drift > 0ns;
    ok &= onset && growing && positive;
    const Duration first_mag = from3.empty() ? 0ns : from3.front()->jump.magnitude().value_or(0ns);
    const Duration land_first = from3.empty() ? 0ns : from3.front()->jump.post - from3.front()->t;
    const Duration land_last = from3.empty() ? 0ns : from3.back()->jump.post - from3.back()->t;
    detail += fmt("node %d: pre-switch max|rate| %.0f ppm, %zu forward jumps from node 3, first at +%.2f s "
                  "(%.3f s), landing drift %.3f s -> %.3f s%s; ",
                  id, worst, from3.size(), from3.empty() ? -1.0 : to_seconds(from3.front()->t - sw),
                  to_seconds(first_mag), to_seconds(land_first), to_seconds(land_last),
                  growing ? " rising" : " NOT rising");
  }
  return {ok, detail};
}

Outcome a4() {
  const Trace& t = builtin_trace("f_plus_all_aex");
  bool ok = true;
  std::string detail;
  for (EntityId id : {EntityId{1}, EntityId{2}}) {
    Duration lowest{0};
    for (const auto& r : t.records) {
      if (r.node == id && r.drift() && r.state == NodeState::OK) lowest = std::min(lowest, *r.drift());
    }
    const auto rates = segment_rates(t, id, {}, t.horizon);
    double worst = 0.0;
    for (double r : rates) worst = std::max(worst, std::abs(r));
    ok &= lowest >= kHonestDriftFloor && worst <= kHonestEnvelopePpm;
    detail += fmt("node %d: min drift %.3f ms, max|rate| %.0f ppm; ", id, to_seconds(lowest) * 1e3, worst);
  }
  // The attacker alternates between its slow clock and forward peer jumps.
  std::size_t forward = 0;
  for (const auto& j : t.jumps) {
    if (j.node == 3 && j.jump.source != kTimeAuthority && j.jump.adopted &&
        j.jump.magnitude().value_or(0ns) > 0ns)
      ++forward;
  }
  const auto rates3 = segment_rates(t, 3, {}, t.horizon);
  const bool slow = !rates3.empty() && median(rates3) < -kFPlusDriftTolPpm * 10;
  ok &= forward >= 10 && slow;
  detail += fmt("attacker: %zu forward peer jumps, median segment rate %.0f ppm", forward,
                rates3.empty() ? 0.0 : median(rates3));
  return {ok, detail};
}

Outcome a5() {
  bool ok = true;
  std::string detail;
  for (const auto& [name, threshold, strict] :
       {std::tuple{"fault_free_triad_like", kAvailTriadLike, true}, std::tuple{"fault_free_low_aex", kAvailLowAex, false}}) {
    const Trace& t = builtin_trace(name);
    detail += std::string(name) + ":";
    for (EntityId id = 1; id <= t.scenario.node_count(); ++id) {
      const double a = availability(t, id);
      ok &= strict ? a > threshold : a >= threshold;
      detail += fmt(" %.5f", a);
    }
    detail += fmt(" (%s %.3f); ", strict ? ">" : ">=", threshold);
  }
  return {ok, detail};
}

/// Node's clock at reference time t, interpolated on its records when both
/// neighbours share an epoch.
std::optional<long double> clock_at(const std::vector<const ScenarioRecord*>& recs, ReferenceTime t) {
  auto it = std::lower_bound(recs.begin(), recs.end(), t,
                             [](const ScenarioRecord* r, ReferenceTime v) { return r->t < v; });
  if (it == recs.end() || it == recs.begin()) return std::nullopt;
  const ScenarioRecord* hi = *it;
  const ScenarioRecord* lo = *(it - 1);
  if (lo->epoch != hi->epoch || !lo->node_time || !hi->node_time || hi->t == lo->t) return std::nullopt;
  const long double f = static_cast<long double>(t.ns - lo->t.ns) / static_cast<long double>(hi->t.ns - lo->t.ns);
  return static_cast<long double>(lo->node_time->ns) + f * static_cast<long double>(hi->node_time->ns - lo->node_time->ns);
}

Outcome a6() {
  const Trace& t = builtin_trace("fastest_clock");
  std::vector<const ScenarioRecord*> recs3;
  for (const auto& r : t.records) {
    if (r.node == 3 && r.node_time) recs3.push_back(&r);
  }
  std::size_t untaints = 0, exact = 0, checked = 0, matched = 0;
  for (const auto& j : t.jumps) {
    if (j.node == 3 || j.jump.source != 3 || !j.jump.adopted) continue;
    ++untaints;
    exact += j.jump.post == j.jump.payload;
    if (auto c3 = clock_at(recs3, j.t)) {
      ++checked;
      const long double gap = *c3 - static_cast<long double>(j.jump.post.ns);
      matched += gap >= -1.0L && gap <= static_cast<long double>(kMaxOneWay.count()) * 1.001L + 1.0L;
    }
  }
  std::map<EntityId, Duration> final_drift;
  for (const auto& r : t.records) {
    if (r.drift()) final_drift[r.node] = *r.drift();
  }
  const double d3 = to_seconds(final_drift[3]);
  bool pulled = d3 > 0.0;
  for (EntityId id : {EntityId{1}, EntityId{2}}) {
    pulled &= std::abs(to_seconds(final_drift[id]) - d3) <= kPullFraction * std::abs(d3);
  }
  const bool ok = untaints > 0 && exact == untaints && checked >= untaints / 2 && matched == checked && pulled;
  return {ok, fmt("%zu adoptions from node 3, %zu equal the payload, %zu/%zu within one link delay of node 3's "
                  "clock; final drift node1 %.3f ms, node2 %.3f ms, node3 %.3f ms",
                  untaints, exact, matched, checked, to_seconds(final_drift[1]) * 1e3,
                  to_seconds(final_drift[2]) * 1e3, d3 * 1e3)};
}

Outcome a7() {
  std::vector<std::uint64_t> seeds;
  for (int i = 1; i <= kSeeds; ++i) seeds.push_back(static_cast<std::uint64_t>(i) * 7919);
  std::uint64_t violations = 0, served = 0, runs = 0;
  for (const auto& name : builtin_names()) {
    for (const auto& d : run_seeds_parallel(builtin_scenario(name), seeds)) {
      violations += d.monotonic_violations;
      served += d.served;
      ++runs;
    }
  }
  return {violations == 0 && served > 0,
          fmt("%llu runs, %llu served timestamps, %llu monotonicity violations", (unsigned long long)runs,
              (unsigned long long)served, (unsigned long long)violations)};
}

Outcome a8() {
  const clock::MonitorCounter counter;
  sim::RngStream noise(1, "acceptance.monitor");
  // Change the scale at 20 positions inside a window; the window in flight
  // or the one right after must flag it.
  int detected = 0;
  const int positions = 20;
  for (int k = 0; k < positions; ++k) {
    clock::TscTimeline tl;
    const ReferenceTime w0 = at(1s);
    const Duration honest = tl.time_to_advance(counter.window_ticks, w0);
    const ReferenceTime change = w0 + honest * k / positions;
    tl.apply(change, {clock::kTestbedTscHz, tl.read(change) - clock::tsc_read({clock::kTestbedTscHz, 0, kScale}, change), kScale});
    const auto first = clock::monitor_window(counter, tl, w0, std::nullopt, noise);
    const auto second = clock::monitor_window(counter, tl, first.window_end, std::nullopt, noise);
    detected += first.verdict == clock::MonitorVerdict::Discrepancy ||
                second.verdict == clock::MonitorVerdict::Discrepancy;
  }
  // The same through the simulator: a 1% attack on a quiet node.
  Scenario s = builtin_scenario("fastest_clock");
  for (auto& n : s.nodes) n.aex = clock::AexSchedule::none();
  s.horizon = 40s;
  attacks::AttackPolicy p;
  p.kind = attacks::AttackKind::TscScale;
  p.node = 2;
  p.tsc_scale = kScale;
  p.active_from = at(30s);
  s.attacks = {p};
  const Trace t = simulate(s, {false});
  clock::TscTimeline honest_tl;
  const Duration window = honest_tl.time_to_advance(counter.window_ticks, {});
  const bool sim_flagged = !t.detections.empty() && t.detections.front().node == 2 &&
                           t.detections.front().t - at(30s) <= window;

  const auto batch = monitor_batch_parallel(counter, honest_tl, kHonestWindows, 2024);
  const double rate = static_cast<double>(batch.discrepancies) / static_cast<double>(batch.windows);
  const bool ok = detected == positions && sim_flagged && rate < kFalseAlarmRate;
  return {ok, fmt("scale %.2f flagged within one window at %d/%d change points, simulator detection %s; "
                  "%llu/%llu honest windows flagged (%.4f < %.2f)",
                  kScale, detected, positions, sim_flagged ? "in time" : "MISSING",
                  (unsigned long long)batch.discrepancies, (unsigned long long)batch.windows, rate, kFalseAlarmRate)};
}

Outcome a9() {
  sim::RngStream rng(0xA9, "acceptance.regression");
  long double worst = 0.0L;
  int failures = 0;
  for (int i = 0; i < kFuzzSets; ++i) {
    std::vector<protocol::CalibrationSample> samples;
    std::vector<std::pair<std::int64_t, std::int64_t>> xy;
    const std::size_t n = 2 + rng.below(63);
    const double f = 1e9 + static_cast<double>(rng.below(4'000'000'000ULL));
    for (std::size_t k = 0; k < n; ++k) {
      const Duration s{k < 2 ? static_cast<std::int64_t>(k) * 1'000'000'000
                             : static_cast<std::int64_t>(rng.below(3'000'000'001ULL))};
      const bool valid = k < 2 || rng.bernoulli(0.85);
      const Ticks d = static_cast<Ticks>(f * to_seconds(s)) + rng.between(0, 300'000'000);
      samples.push_back({s, d, valid});
      if (valid) xy.emplace_back(s.count(), d);
    }
    const long double want = oracle::exact_slope(xy) * 1e9L;
    const long double got = protocol::calibrate_speed(samples);
    const long double rel = std::abs(got - want) / std::abs(want);
    worst = std::max(worst, rel);
    failures += rel > kOracleRelTol;
  }
  return {failures == 0, fmt("%d sample sets, worst relative error %.3Le (limit %.0Le)", kFuzzSets, worst, kOracleRelTol)};
}

Outcome a10() {
  bool ok = true;
  std::string detail;
  for (const auto& name : builtin_names()) {
    const Scenario s = builtin_scenario(name);
    const auto first = render_csv(simulate(s));
    const auto second = render_csv(simulate(s));
    std::size_t bytes = 0;
    for (const auto& [f, body] : first) bytes += body.size();
    const bool same = first == second;
    ok &= same;
    detail += fmt("%s %s (%zu bytes); ", name.c_str(), same ? "identical" : "DIFFERENT", bytes);
  }
  return {ok, detail};
}

Outcome a11() {
  const Trace& t = builtin_trace("fault_free_triad_like");
  if (t.scenario.nodes.front().aex.correlated_probability <= 0.0) return {false, "scenario has no correlated AEXs"};
  std::size_t resets = 0, coupled = 0;
  std::map<EntityId, const ScenarioRecord*> prev;
  for (const auto& r : t.records) {
    if (!r.drift()) continue;
    const ScenarioRecord* p = prev[r.node];
    prev[r.node] = &r;
    if (!p) continue;
    const Duration before = *p->drift(), after = *r.drift();
    const bool reset = std::chrono::abs(before) >= kResetEps * kResetRatio && std::chrono::abs(after) <= kResetEps;
    if (!reset) continue;
    ++resets;
    coupled += r.cum_ta_ref == p->cum_ta_ref + 1;
  }
  std::uint64_t ta = 0;
  for (auto n : t.ta_references) ta += n;
  return {resets > 0 && coupled == resets,
          fmt("%zu drift resets, %zu coincide with a TA reference increment (%llu TA references in total)", resets,
              coupled, (unsigned long long)ta)};
}

}  // namespace

int main() {
  const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria{
      {"A1 F+ calibration math", a1},
      {"A2 F-- calibration math", a2},
      {"A3 F-- propagation to honest nodes", a3},
      {"A4 F+ does not propagate", a4},
      {"A5 availability", a5},
      {"A6 fastest-clock following", a6},
      {"A7 monotonicity across builtins and seeds", a7},
      {"A8 monitor detection and false alarms", a8},
      {"A9 regression matches exact oracle", a9},
      {"A10 deterministic CSVs", a10},
      {"A11 drift resets coincide with TA references", a11},
  };
  int failed = 0;
  for (const auto& [name, check] : criteria) {
    Outcome o;
    try {
      o = check();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    failed += !o.pass;
    std::printf("%s  %s: %s\n", o.pass ? "PASS" : "FAIL", name, o.detail.c_str());
    std::fflush(stdout);
  }
  std::printf("%d of %zu criteria passed\n", static_cast<int>(criteria.size()) - failed, criteria.size());
  return failed == 0 ? 0 : 1;
}
