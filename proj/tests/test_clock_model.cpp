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

#include <doctest.h>

#include <map>

#include "oracles.hpp"
#include "triad/clock/aex.hpp"
#include "triad/clock/monitor.hpp"
#include "triad/clock/tsc.hpp"
#include "triad/sim/error.hpp"

using namespace triad;
using namespace triad::clock;
using namespace std::chrono_literals;

TEST_CASE("tsc_read examples") {
  CHECK(tsc_read({kTestbedTscHz, 0, 1.0}, at(1s)) == 2'899'999'000);
  CHECK(tsc_read({kTestbedTscHz, 1234, 1.0}, ReferenceTime{}) == 1234);
  CHECK(tsc_read({2'900'000'000, 0, 1.1}, at(1s)) == 3'190'000'000);
}

TEST_CASE("tsc_read agrees with per-millisecond accumulation") {
  for (std::uint64_t t_ns : {0ULL, 1ULL, 999'999ULL, 1'000'000'000ULL, 1'234'567'891ULL, 7'000'000'003ULL}) {
    CHECK(tsc_read({kTestbedTscHz, 0, 1.0}, ReferenceTime{t_ns}) ==
          oracle::tsc_by_accumulation(kTestbedTscHz, 1, 1, t_ns));
    CHECK(tsc_read({2'900'000'000, 0, 1.1}, ReferenceTime{t_ns}) ==
          oracle::tsc_by_accumulation(2'900'000'000, 11, 10, t_ns));
  }
}

TEST_CASE("tsc_read is non-decreasing") {
  const TscModel m{kTestbedTscHz, -500, 1.0};
  const TscModel s{kTestbedTscHz, 0, 0.97};
  Ticks prev_m = tsc_read(m, {}), prev_s = tsc_read(s, {});
  for (std::uint64_t t = 1; t < 20'000; t += 3) {
    const Ticks a = tsc_read(m, ReferenceTime{t});
    const Ticks b = tsc_read(s, ReferenceTime{t});
    CHECK(a >= prev_m);
    CHECK(b >= prev_s);
    prev_m = a;
    prev_s = b;
  }
}

TEST_CASE("timeline changes apply at their boundary") {
  TscTimeline tl;
  tl.apply(at(1s), {kTestbedTscHz, 100, 1.0});
  CHECK(tl.read(at(1s) + (-1ns)) == tsc_read({}, at(1s) + (-1ns)));
  CHECK(tl.read(at(1s)) == 2'899'999'000 + 100);
  CHECK(tl.segment_count() == 2);
  CHECK_THROWS_AS(tl.apply(at(500ms), {}), ConfigError);
  CHECK_THROWS_AS(tl.apply(at(2s), {kTestbedTscHz, 0, 0.0}), ConfigError);
}

TEST_CASE("first_time_reaching finds the earliest instant") {
  TscTimeline tl;
  const Ticks target = 15'000'000;
  const ReferenceTime t = tl.first_time_reaching(target, {});
  CHECK(tl.read(t) >= target);
  CHECK(tl.read(ReferenceTime{t.ns - 1}) < target);
  // An offset jump can carry the counter straight past the target.
  tl.apply(at(1ms), {kTestbedTscHz, 20'000'000, 1.0});
  CHECK(tl.first_time_reaching(target, {}) == at(1ms));
}

namespace {

MonitorCounter quiet_counter() {
  MonitorCounter c;
  c.noise_std = 0.0;
  return c;
}

}  // namespace

TEST_CASE("honest window matches the counting-loop oracle") {
  const MonitorCounter c = quiet_counter();
  TscTimeline tl;
  sim::RngStream noise(1, "noise");
  const auto out = monitor_window(c, tl, at(3s), std::nullopt, noise);
  const auto brute = oracle::counting_loop(c.core_frequency_hz, c.window_ticks, at(3s).ns, [](std::uint64_t t) {
    return static_cast<std::int64_t>(static_cast<unsigned __int128>(kTestbedTscHz) * t / 1'000'000'000u);
  });
  CHECK(out.verdict == MonitorVerdict::Ok);
  CHECK(std::abs(out.observed_count - static_cast<double>(brute)) <= 1.0);
  CHECK(std::abs(out.observed_count - 632'182.0) <= 1.0);
}

TEST_CASE("1% scale attack is a discrepancy") {
  const MonitorCounter c = quiet_counter();
  TscTimeline tl;
  tl.apply(at(1s), {kTestbedTscHz, 0, 1.01});
  sim::RngStream noise(1, "noise");
  const auto out = monitor_window(c, tl, at(2s), std::nullopt, noise);
  const auto brute = oracle::counting_loop(c.core_frequency_hz, c.window_ticks, at(2s).ns, [](std::uint64_t t) {
    return static_cast<std::int64_t>(static_cast<unsigned __int128>(kTestbedTscHz) * 101 * t /
                                     100'000'000'000ULL);
  });
  CHECK(out.verdict == MonitorVerdict::Discrepancy);
  CHECK(std::abs(out.observed_count - static_cast<double>(brute)) <= 2.0);
  CHECK(out.observed_count == doctest::Approx(625'922).epsilon(1e-4));
}

TEST_CASE("offset jump mid-window halves the count") {
  const MonitorCounter c = quiet_counter();
  TscTimeline tl;
  const ReferenceTime start = at(1s);
  const Duration honest = tl.time_to_advance(c.window_ticks, start);
  tl.apply(start + honest / 2, {kTestbedTscHz, 15'000'000, 1.0});
  sim::RngStream noise(1, "noise");
  const auto out = monitor_window(c, tl, start, std::nullopt, noise);
  CHECK(out.verdict == MonitorVerdict::Discrepancy);
  CHECK(out.observed_count == doctest::Approx(632'182.0 / 2).epsilon(1e-4));
}

TEST_CASE("interrupted window has no verdict") {
  TscTimeline tl;
  sim::RngStream noise(1, "noise");
  const auto out = monitor_window(MonitorCounter{}, tl, at(1s), at(1s) + 1ms, noise);
  CHECK(out.verdict == MonitorVerdict::Interrupted);
  const auto after = monitor_window(MonitorCounter{}, tl, at(1s), at(1s) + 10ms, noise);
  CHECK(after.verdict != MonitorVerdict::Interrupted);
}

TEST_CASE("honest windows with 2.9-count noise rarely alarm") {
  MonitorCounter c;
  TscTimeline tl;
  sim::RngStream noise(5, "noise");
  int alarms = 0;
  ReferenceTime t{};
  for (int i = 0; i < 10'000; ++i) {
    const auto out = monitor_window(c, tl, t, std::nullopt, noise);
    alarms += out.verdict == MonitorVerdict::Discrepancy;
    t = out.window_end;
  }
  CHECK(alarms < 100);
  CHECK(c.false_alarm_probability() < 1e-12);
}

TEST_CASE("monitor configuration checks") {
  MonitorCounter c;
  CHECK_NOTHROW(c.validate());
  c.tolerance = 8.0;
  CHECK_THROWS_AS(c.validate(), ConfigError);
  c = MonitorCounter{};
  c.core_frequency_scale = 0.9;
  CHECK_THROWS_AS(c.validate(), ConfigError);
  c.allow_core_frequency_attack = true;
  CHECK_NOTHROW(c.validate());
  c = MonitorCounter{};
  c.calibrate(2.0 * static_cast<double>(kTestbedTscHz));
  CHECK(c.expected_count == doctest::Approx(632'182.0 / 2));
}

TEST_CASE("aex schedules") {
  sim::RngStream rng(9, "aex");
  SUBCASE("triad_like atoms are equiprobable") {
    std::map<std::int64_t, int> counts;
    const int n = 100'000;
    for (int i = 0; i < n; ++i) ++counts[(*next_aex(AexSchedule::triad_like(), {}, rng)).ns];
    REQUIRE(counts.size() == 3);
    for (auto ms : {10ms, 532ms, 1590ms}) {
      const double freq = static_cast<double>(counts[Duration{ms}.count()]) / n;
      CHECK(std::abs(freq - 1.0 / 3.0) < 0.01);
    }
  }
  SUBCASE("low_aex is 5.4 minutes") {
    CHECK(*next_aex(AexSchedule::low_aex(), at(1s), rng) == at(1s) + 324s);
  }
  SUBCASE("none never fires") { CHECK_FALSE(next_aex(AexSchedule::none(), {}, rng).has_value()); }
  SUBCASE("parsing and validation") {
    CHECK(parse_aex_regime("low_aex") == AexRegime::LowAex);
    CHECK_THROWS_AS(parse_aex_regime("often"), ConfigError);
    CHECK_THROWS_AS(AexSchedule::triad_like(1.5).validate(), ConfigError);
    CHECK_THROWS_AS(AexSchedule::custom_delays(sim::ConstantDelay{0s}).validate(), ConfigError);
  }
}
