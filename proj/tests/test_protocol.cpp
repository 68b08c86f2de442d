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

#include <cmath>

#include "fake_context.hpp"
#include "oracles.hpp"
#include "triad/protocol/calibration.hpp"
#include "triad/protocol/messages.hpp"
#include "triad/protocol/node.hpp"
#include "triad/protocol/node_clock.hpp"
#include "triad/protocol/time_authority.hpp"
#include "triad/sim/error.hpp"
#include "triad/sim/rng.hpp"

using namespace triad;
using namespace triad::protocol;
using triad::testing::FakeContext;
using triad::testing::serve_ta;
using namespace std::chrono_literals;

namespace {

constexpr double kF = 2.9e9;

std::vector<CalibrationSample> pair_samples(Ticks d0, Ticks d1) { return {{0s, d0, true}, {1s, d1, true}}; }

NodeConfig config_for(EntityId id, std::vector<EntityId> peers) {
  NodeConfig c;
  c.id = id;
  c.peers = std::move(peers);
  return c;
}

Duration fixed_rtt(Duration) { return 10ms; }

/// Node 1 of a three-node cluster, calibrated at exactly kF and anchored at
/// `anchor` at the current TSC.
struct Fixture {
  FakeContext ctx;
  TriadNode node{config_for(1, {2, 3}), ctx};
  explicit Fixture(Timestamp anchor = Timestamp{1'000'000'000'000}) {
    node.start();
    serve_ta(node, ctx, kF, anchor, [](Duration) { return 0ns; });
    REQUIRE(node.state() == NodeState::OK);
    REQUIRE(node.clock().f_calib == doctest::Approx(kF).epsilon(1e-12));
    ctx.sent.clear();
  }
};

}  // namespace

TEST_CASE("calibrate_speed examples") {
  CHECK(calibrate_speed(pair_samples(29'000'000, 2'929'000'000)) == doctest::Approx(2.9e9).epsilon(1e-12));
  CHECK(calibrate_speed(pair_samples(29'000'000, 3'219'000'000)) == doctest::Approx(3.19e9).epsilon(1e-12));
  CHECK(calibrate_speed(pair_samples(319'000'000, 2'929'000'000)) == doctest::Approx(2.61e9).epsilon(1e-12));
}

TEST_CASE("calibrate_speed error paths") {
  const std::vector<CalibrationSample> same{{1s, 100, true}, {1s, 200, true}};
  CHECK_THROWS_AS(calibrate_speed(same), SingularRegression);
  const std::vector<CalibrationSample> one{{0s, 100, true}, {1s, 200, false}};
  CHECK_THROWS_AS(calibrate_speed(one), InsufficientData);
  CHECK_THROWS_AS(calibrate_speed({}), InsufficientData);
}

TEST_CASE("invalid samples are ignored") {
  auto samples = pair_samples(29'000'000, 2'929'000'000);
  samples.push_back({1s, 123, false});
  samples.push_back({0s, 999'999'999, false});
  const auto fit = fit_calibration(samples);
  CHECK(fit.samples_used == 2);
  CHECK(fit.slope_hz == doctest::Approx(2.9e9).epsilon(1e-12));
  CHECK(fit.intercept_ticks == doctest::Approx(29'000'000));
}

TEST_CASE("two-point slope is exact") {
  sim::RngStream rng(4, "pairs");
  for (int i = 0; i < 200; ++i) {
    const Ticks d0 = static_cast<Ticks>(rng.below(1'000'000'000));
    const Ticks d1 = d0 + static_cast<Ticks>(rng.below(10'000'000'000ULL));
    const double slope = calibrate_speed(pair_samples(d0, d1));
    CHECK(slope == static_cast<double>(d1 - d0));
  }
}

TEST_CASE("a common delay on every sample only moves the intercept") {
  sim::RngStream rng(8, "shift");
  std::vector<CalibrationSample> base;
  for (int i = 0; i < 16; ++i) {
    const Duration s = i % 2 ? 1s : 0s;
    base.push_back({s, static_cast<Ticks>(kF * to_seconds(s + 10ms)) + rng.between(-50'000, 50'000), true});
  }
  auto shifted = base;
  for (auto& s : shifted) s.tsc_delta += static_cast<Ticks>(kF * 0.1);
  const auto a = fit_calibration(base);
  const auto b = fit_calibration(shifted);
  CHECK(a.slope_hz == doctest::Approx(b.slope_hz).epsilon(1e-12));
  CHECK(b.intercept_ticks - a.intercept_ticks == doctest::Approx(kF * 0.1));
}

TEST_CASE("fit matches the exact normal-equation oracle") {
  sim::RngStream rng(21, "fuzz");
  for (int i = 0; i < 100; ++i) {
    std::vector<CalibrationSample> samples;
    std::vector<std::pair<std::int64_t, std::int64_t>> xy;
    const std::size_t n = 2 + rng.below(30);
    for (std::size_t k = 0; k < n; ++k) {
      const Duration s{static_cast<std::int64_t>(k % 2 ? rng.below(5'000'000'000ULL) : rng.below(1'000'000))};
      const Ticks d = static_cast<Ticks>(rng.below(20'000'000'000ULL));
      samples.push_back({s, d, true});
      xy.emplace_back(s.count(), d);
    }
    const long double expect = oracle::exact_slope(xy) * 1e9L;
    CHECK(std::abs((static_cast<long double>(calibrate_speed(samples)) - expect) / expect) < 1e-9L);
  }
}

TEST_CASE("estimate_now examples") {
  NodeClock c{Timestamp{100'000'000'000}, 0, 2.9e9, false, {}};
  CHECK(estimate_now(c, 2'900'000'000).ns == 101'000'000'000);
  c.f_calib = 3.19e9;
  CHECK(estimate_now(c, 2'900'000'000).ns == 100'909'090'909);
  c.f_calib = 2.61e9;
  CHECK(estimate_now(c, 2'900'000'000).ns == 101'111'111'111);
  c.anchor_tsc = 10;
  CHECK_THROWS_AS(estimate_now(c, 9), BackwardsTsc);
  c.f_calib = 0.0;
  CHECK_THROWS_AS(estimate_now(c, 20), ConfigError);
  CHECK(perceived_to_ticks(200ms, 2.9e9) == 580'000'000);
}

TEST_CASE("full calibration on an honest jittered network") {
  FakeContext ctx;
  TriadNode node(config_for(1, {2, 3}), ctx);
  node.start();
  CHECK(ctx.transitions.front().first == std::nullopt);
  CHECK(ctx.transitions.front().second == NodeState::FullCalib);
  sim::RngStream jitter(3, "jitter");
  serve_ta(node, ctx, kF, Timestamp{42}, [&](Duration) { return 10ms + Duration{jitter.between(0, 4'000'000)}; });
  CHECK(node.state() == NodeState::OK);
  REQUIRE(ctx.calibrations.size() == 1);
  CHECK(ctx.calibrations[0].valid_samples == 16);
  CHECK(std::abs(node.clock().f_calib / kF - 1.0) < 5e-4);
  CHECK(node.ta_references() == 1);
  CHECK(node.clock().anchor_ref == Timestamp{42});
}

TEST_CASE("interrupted roundtrips are dropped from the regression") {
  FakeContext ctx;
  TriadNode node(config_for(1, {2, 3}), ctx);
  node.start();
  serve_ta(node, ctx, kF, Timestamp{}, fixed_rtt, [](std::size_t i) { return i == 2 || i == 7 || i == 11; });
  REQUIRE(ctx.calibrations.size() == 1);
  CHECK(ctx.calibrations[0].valid_samples == 13);
  CHECK(ctx.calibrations[0].total_samples == 16);
  CHECK(node.clock().f_calib == doctest::Approx(kF).epsilon(1e-9));
}

TEST_CASE("a fully interrupted batch is retried") {
  FakeContext ctx;
  TriadNode node(config_for(1, {2, 3}), ctx);
  node.start();
  serve_ta(node, ctx, kF, Timestamp{}, fixed_rtt, [](std::size_t i) { return i < 16; });
  REQUIRE(ctx.calibrations.size() == 1);
  CHECK(ctx.calibrations[0].batches == 2);
  CHECK(ctx.calibrations[0].valid_samples == 16);
}

TEST_CASE("calibration bias scales the result") {
  FakeContext ctx;
  auto cfg = config_for(1, {2});
  cfg.calibration_bias_ppm = -300;
  TriadNode node(cfg, ctx);
  node.start();
  serve_ta(node, ctx, kF, Timestamp{}, fixed_rtt);
  CHECK(node.clock().f_calib == doctest::Approx(kF * (1 - 300e-6)).epsilon(1e-12));
  CHECK(ctx.calibrations[0].raw_slope_hz == doctest::Approx(kF).epsilon(1e-12));
}

TEST_CASE("reference calibration adopts the payload without compensation") {
  // The TA stamps 1000 s; 5 ms later the response arrives and is adopted as is,
  // so the node runs 5 ms behind reference time.
  FakeContext ctx;
  TriadNode node(config_for(1, {2, 3}), ctx);
  node.start();
  serve_ta(node, ctx, kF, Timestamp{1'000'000'000'000}, fixed_rtt);
  const Ticks anchor = ctx.tsc;
  CHECK(node.clock().anchor_tsc == anchor);
  CHECK(node.reading()->ns == 1'000'000'000'000);
  const ReferenceTime true_arrival = at(1000s) + 5ms;
  CHECK((*node.reading() - true_arrival) == -5ms);
}

TEST_CASE("reference request timeout resends") {
  FakeContext ctx;
  TriadNode node(config_for(1, {2}), ctx);
  node.start();
  // Answer the speed samples, then let the reference request time out.
  while (ctx.sent.back().kind == MessageKind::TaSleepRequest) {
    const auto req = ctx.sent.back();
    ctx.tsc += static_cast<Ticks>(kF * to_seconds(req.requested_sleep() + 10ms));
    node.on_message({MessageKind::TaSleepResponse, kTimeAuthority, 1, req.nonce, req.sleep_ns, 0});
  }
  REQUIRE(ctx.sent.back().kind == MessageKind::TaRefRequest);
  const auto first = ctx.sent.back();
  REQUIRE(ctx.timers.size() == 1);
  CHECK(ctx.timers.begin()->second.ticks == perceived_to_ticks(200ms, node.clock().f_calib));
  ctx.fire_timer(node);
  CHECK(ctx.sent.back().kind == MessageKind::TaRefRequest);
  CHECK(ctx.sent.back().nonce != first.nonce);
  // The stale response is ignored; the fresh one completes.
  node.on_message({MessageKind::TaRefResponse, kTimeAuthority, 1, first.nonce, 0, 5});
  CHECK(node.state() == NodeState::FullCalib);
  node.on_message({MessageKind::TaRefResponse, kTimeAuthority, 1, ctx.sent.back().nonce, 0, 5});
  CHECK(node.state() == NodeState::OK);
}

TEST_CASE("aex in OK taints and asks every peer") {
  Fixture f;
  f.node.on_aex();
  CHECK(f.node.state() == NodeState::Tainted);
  REQUIRE(f.ctx.sent.size() == 2);
  CHECK(f.ctx.sent[0].kind == MessageKind::PeerTimeRequest);
  CHECK(f.ctx.sent[0].receiver == 2);
  CHECK(f.ctx.sent[1].receiver == 3);
  CHECK(f.ctx.timers.size() == 1);
  f.node.on_aex();
  CHECK(f.node.state() == NodeState::Tainted);
  CHECK(f.ctx.sent.size() == 4);
  CHECK(f.ctx.timers.size() == 1);
  CHECK_FALSE(f.node.serve_timestamp().has_value());
}

namespace {

ProtocolMessage peer_reply(const ProtocolMessage& request, std::int64_t payload_ns) {
  return make_peer_response(request, Timestamp{payload_ns});
}

}  // namespace

TEST_CASE("peer responses: adopt higher, otherwise bump by one nanosecond") {
  const std::int64_t L = 1'000'000'000'000;
  SUBCASE("higher payload is adopted") {
    Fixture f(Timestamp{L});
    f.node.on_aex();
    f.node.on_message(peer_reply(f.ctx.sent[0], L + 50'000'000));
    CHECK(f.node.state() == NodeState::OK);
    CHECK(f.node.clock().anchor_ref.ns == L + 50'000'000);
    CHECK(f.ctx.jumps.back().adopted);
    CHECK(*f.ctx.jumps.back().magnitude() == 50ms);
    CHECK(f.ctx.timers.empty());
  }
  SUBCASE("lower payload bumps") {
    Fixture f(Timestamp{L});
    f.node.on_aex();
    f.node.on_message(peer_reply(f.ctx.sent[1], L - 100'000'000));
    CHECK(f.node.clock().anchor_ref.ns == L + 1);
    CHECK_FALSE(f.ctx.jumps.back().adopted);
  }
  SUBCASE("equal payload bumps") {
    Fixture f(Timestamp{L});
    f.node.on_aex();
    f.node.on_message(peer_reply(f.ctx.sent[0], L));
    CHECK(f.node.clock().anchor_ref.ns == L + 1);
  }
  SUBCASE("second response for the same round is ignored") {
    Fixture f(Timestamp{L});
    f.node.on_aex();
    f.node.on_message(peer_reply(f.ctx.sent[0], L + 5));
    f.node.on_message(peer_reply(f.ctx.sent[1], L + 999'999));
    CHECK(f.node.clock().anchor_ref.ns == L + 5);
    CHECK(f.node.peer_untaints() == 1);
  }
  SUBCASE("response from an earlier round is stale") {
    Fixture f(Timestamp{L});
    f.node.on_aex();
    const auto old = f.ctx.sent[0];
    f.node.on_aex();
    f.node.on_message(peer_reply(old, L + 5));
    CHECK(f.node.state() == NodeState::Tainted);
    f.node.on_message(peer_reply(f.ctx.sent[2], L + 5));
    CHECK(f.node.state() == NodeState::OK);
  }
}

TEST_CASE("peer requests are answered only in OK") {
  Fixture f(Timestamp{500'123'000'000});
  const ProtocolMessage req = make_peer_request(2, 1, 77);
  f.node.on_message(req);
  REQUIRE(f.ctx.sent.size() == 1);
  CHECK(f.ctx.sent[0].kind == MessageKind::PeerTimeResponse);
  CHECK(f.ctx.sent[0].payload_ns == 500'123'000'000ULL);
  CHECK(f.ctx.sent[0].nonce == 77);
  f.node.on_aex();
  f.ctx.sent.clear();
  f.node.on_message(req);
  CHECK(f.ctx.sent.empty());
}

TEST_CASE("peer timeout falls back to the TA") {
  Fixture f;
  f.node.on_aex();
  f.ctx.fire_timer(f.node);
  CHECK(f.node.state() == NodeState::RefCalib);
  CHECK(f.ctx.sent.back().kind == MessageKind::TaRefRequest);
  // A late peer response no longer untaints.
  f.node.on_message(peer_reply(f.ctx.sent[0], 5));
  CHECK(f.node.state() == NodeState::RefCalib);
  // RefCalib never answers peers.
  const auto before = f.ctx.sent.size();
  f.node.on_message(make_peer_request(2, 1, 9));
  CHECK(f.ctx.sent.size() == before);
  f.node.on_message({MessageKind::TaRefResponse, kTimeAuthority, 1, f.ctx.sent.back().nonce, 0, 7'000'000'000});
  CHECK(f.node.state() == NodeState::OK);
  CHECK(f.node.ta_references() == 2);
}

TEST_CASE("a response just before the deadline avoids the TA") {
  Fixture f;
  f.node.on_aex();
  f.node.on_message(peer_reply(f.ctx.sent[0], 2'000'000'000'000));
  CHECK(f.ctx.timers.empty());
  CHECK(f.node.ta_references() == 1);
  // The timer token is stale after untaint.
  f.node.on_timer(TimerPurpose::PeerResponse, 1);
  CHECK(f.node.state() == NodeState::OK);
}

TEST_CASE("served timestamps strictly increase") {
  Fixture f(Timestamp{1'000'000'000'000});
  const auto a = *f.node.serve_timestamp();
  const auto b = *f.node.serve_timestamp();
  CHECK(b.ns == a.ns + 1);
  // Untaint backwards: still above everything served.
  f.ctx.tsc += 2'900'000'000;
  const auto c = *f.node.serve_timestamp();
  f.node.on_aex();
  f.node.on_message(peer_reply(f.ctx.sent.back(), 1));
  const auto d = *f.node.serve_timestamp();
  CHECK(d > c);
}

TEST_CASE("discrepancy forces full calibration") {
  Fixture f;
  f.node.on_discrepancy();
  CHECK(f.node.state() == NodeState::FullCalib);
  CHECK(f.ctx.sent.back().kind == MessageKind::TaSleepRequest);
  CHECK(f.ctx.transitions.back().second == NodeState::FullCalib);
}

TEST_CASE("time authority") {
  TimeAuthority ta;
  const auto sleep = ta.handle(make_sleep_request(1, 3, 1s), at(10s));
  REQUIRE(sleep);
  CHECK(sleep->after == 1s);
  CHECK(sleep->message.kind == MessageKind::TaSleepResponse);
  CHECK(sleep->message.nonce == 3);
  CHECK(sleep->message.receiver == 1);
  const auto zero = ta.handle(make_sleep_request(1, 4, 0s), at(10s));
  CHECK(zero->after == 0s);
  const auto ref = ta.handle(make_ref_request(2, 5), at(42s));
  CHECK(ref->message.payload_ns == 42'000'000'000ULL);
  CHECK(ref->after == 0s);
  CHECK_FALSE(ta.handle(make_sleep_request(1, 6, 11s), at(1s)));
  auto negative = make_sleep_request(1, 7, 1s);
  negative.sleep_ns = static_cast<std::uint64_t>(-1);
  CHECK_FALSE(ta.handle(negative, at(1s)));
  CHECK_FALSE(ta.handle(make_peer_request(1, 2, 8), at(1s)));
  CHECK(ta.rejected() == 3);
}

TEST_CASE("message schema") {
  CHECK(is_schema_valid(make_sleep_request(1, 1, 1s)));
  CHECK(is_schema_valid(make_peer_response(make_peer_request(1, 2, 3), Timestamp{5})));
  ProtocolMessage bad = make_peer_request(1, 2, 3);
  bad.payload_ns = 1;
  CHECK_FALSE(is_schema_valid(bad));
  CHECK_FALSE(is_schema_valid(make_peer_request(1, 1, 3)));
  CHECK_FALSE(is_schema_valid(make_peer_request(0, 2, 3)));
}
