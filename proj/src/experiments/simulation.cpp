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

#include "triad/experiments/simulation.hpp"

#include <cmath>
#include <map>
#include <memory>

#include "triad/attacks/policy.hpp"
#include "triad/clock/monitor.hpp"
#include "triad/protocol/time_authority.hpp"
#include "triad/sim/engine.hpp"
#include "triad/transport/network.hpp"

namespace triad::experiments {

namespace {

using protocol::NodeState;
using protocol::ProtocolMessage;
using protocol::TimerPurpose;

enum class Control : std::uint8_t { Sample, RegimeSwitch, AttackActivate, TaSend, MonitorDetect, FalseAlarm };

struct Payload {
  ProtocolMessage msg{};
  std::uint64_t id = 0;
  Control control = Control::Sample;
  double value = 0.0;
};

using SimEngine = sim::Engine<Payload>;

class Simulation;

class Host final : public protocol::NodeContext {
 public:
  Host(Simulation& sim, EntityId id) : sim_(sim), id_(id) {}

  Ticks read_tsc() override;
  void send(const ProtocolMessage& msg) override;
  protocol::TimerId arm_timer(Ticks ticks, TimerPurpose purpose, std::uint64_t token) override;
  void cancel_timer(protocol::TimerId id) override;
  std::uint64_t fresh_nonce() override { return (static_cast<std::uint64_t>(id_) << 48) | ++nonces_; }

  void on_transition(std::optional<NodeState> from, NodeState to) override;
  void on_jump(const protocol::JumpEvent& jump) override;
  void on_speed_calibrated(const protocol::SpeedCalibration& result) override;

 private:
  Simulation& sim_;
  EntityId id_;
  std::uint64_t nonces_ = 0;
};

struct TimerEntry {
  Ticks target = 0;
  TimerPurpose purpose = TimerPurpose::CalibrationSample;
  std::uint64_t token = 0;
  std::optional<sim::EventId> event;
};

struct NodeRuntime {
  EntityId id = 1;
  std::unique_ptr<Host> host;
  std::unique_ptr<protocol::TriadNode> node;
  clock::TscTimeline tsc;
  clock::AexSchedule aex;
  sim::RngStream* aex_stream = nullptr;
  sim::RngStream* corr_stream = nullptr;
  sim::RngStream* monitor_stream = nullptr;
  std::optional<sim::EventId> next_aex_event;
  std::optional<ReferenceTime> next_aex_time;
  ReferenceTime last_aex{};
  clock::MonitorCounter monitor;
  bool pending_scale_check = false;
  std::map<protocol::TimerId, TimerEntry> timers;
  ReferenceTime state_since{};
  NodeState state = NodeState::FullCalib;
  std::optional<Timestamp> last_served;
  std::uint32_t epoch = 0;
};

double effective_rate(const clock::TscModel& m) { return static_cast<double>(m.frequency_hz) * m.scale; }

class Simulation {
 public:
  Simulation(const Scenario& scenario, const RunOptions& options)
      : options_(options),
        engine_(sim::SimConfig{scenario.seed, at(scenario.horizon), false}),
        network_(engine_.streams(), make_classifier(scenario)) {
    trace_.scenario = scenario;
    trace_.horizon = at(scenario.horizon);
    const std::size_t n = scenario.node_count();
    trace_.state_times.assign(n, StateTimes{});
    trace_.aex_counts.assign(n, 0);
    trace_.ta_references.assign(n, 0);
    trace_.peer_untaints.assign(n, 0);
    trace_.monotonic_violations.assign(n, 0);
    trace_.served_count.assign(n, 0);
  }

  Trace run() {
    setup();
    const auto dispatch = engine_.run_until(trace_.horizon, [this](SimEngine&, const SimEngine::Event& e) {
      handle(e);
    });
    for (auto& rt : nodes_) {
      trace_.state_times[rt.id - 1][static_cast<std::size_t>(rt.state)] += trace_.horizon - rt.state_since;
      trace_.ta_references[rt.id - 1] = rt.node->ta_references();
      trace_.peer_untaints[rt.id - 1] = rt.node->peer_untaints();
    }
    trace_.events_dispatched = dispatch.dispatched;
    trace_.event_digest = dispatch.digest;
    return std::move(trace_);
  }

  // NodeContext plumbing.
  Ticks read_tsc(EntityId id) { return rt(id).tsc.read(engine_.now()); }

  void route(const ProtocolMessage& msg) {
    if (auto d = network_.send(msg, engine_.now())) {
      Payload p;
      p.msg = msg;
      engine_.schedule(d->due, msg.receiver, sim::EventKind::MessageDelivery, p);
    }
  }

  protocol::TimerId arm_timer(EntityId id, Ticks ticks, TimerPurpose purpose, std::uint64_t token) {
    NodeRuntime& r = rt(id);
    const protocol::TimerId tid = ++timer_ids_;
    TimerEntry entry{r.tsc.read(engine_.now()) + ticks, purpose, token, std::nullopt};
    schedule_timer(r, tid, entry);
    r.timers.emplace(tid, entry);
    return tid;
  }

  void cancel_timer(EntityId id, protocol::TimerId tid) {
    NodeRuntime& r = rt(id);
    auto it = r.timers.find(tid);
    if (it == r.timers.end()) return;
    if (it->second.event) engine_.cancel(*it->second.event);
    r.timers.erase(it);
  }

  void on_transition(EntityId id, std::optional<NodeState> from, NodeState to) {
    NodeRuntime& r = rt(id);
    const ReferenceTime now = engine_.now();
    if (from) trace_.state_times[id - 1][static_cast<std::size_t>(*from)] += now - r.state_since;
    r.state_since = now;
    r.state = to;
    trace_.transitions.push_back({now, id, from, to});
    if (options_.keep_records && r.node) {
      trace_.records.push_back(make_record(r, to, std::nullopt));
    }
  }

  void on_jump(EntityId id, const protocol::JumpEvent& jump) {
    ++rt(id).epoch;
    trace_.jumps.push_back({engine_.now(), id, jump});
  }

  void on_speed_calibrated(EntityId id, const protocol::SpeedCalibration& result) {
    ++rt(id).epoch;
    trace_.calibrations.push_back(
        {engine_.now(), id, result, effective_rate(rt(id).tsc.model_at(engine_.now()))});
  }

 private:
  static transport::SleepClassifier make_classifier(const Scenario& s) {
    double accuracy = 1.0;
    for (const auto& a : s.attacks) {
      if (a.uses_hook()) accuracy = a.classifier_accuracy;
    }
    return transport::SleepClassifier(accuracy);
  }

  NodeRuntime& rt(EntityId id) { return nodes_[id - 1]; }

  void setup() {
    const Scenario& s = trace_.scenario;
    s.validate();
    const auto n = static_cast<EntityId>(s.node_count());

    for (EntityId a = 0; a <= n; ++a) {
      for (EntityId b = a + 1; b <= n; ++b) {
        const LinkSpec& l = s.link_between(a, b);
        network_.add_link({a, b, l.base_delay, l.jitter, l.loss_probability});
      }
    }
    for (const auto& policy : s.attacks) attacks::install(policy, network_);

    nodes_.resize(n);
    for (EntityId id = 1; id <= n; ++id) {
      const NodeSpec& spec = s.nodes[id - 1];
      NodeRuntime& r = rt(id);
      r.id = id;
      r.tsc = clock::TscTimeline(clock::TscModel{spec.tsc_hz, spec.tsc_offset, 1.0});
      r.aex = spec.aex;
      const std::string suffix = std::to_string(id);
      r.aex_stream = &engine_.streams().create("aex." + suffix);
      r.corr_stream = &engine_.streams().create("aex.corr." + suffix);
      r.monitor_stream = &engine_.streams().create("monitor." + suffix);
      // The in-enclave monitor measures its expected count against the TSC
      // at start-up.
      r.monitor = s.monitor;
      r.monitor.calibrate(static_cast<double>(spec.tsc_hz));

      protocol::NodeConfig cfg;
      cfg.id = id;
      for (EntityId p = 1; p <= n; ++p) {
        if (p != id) cfg.peers.push_back(p);
      }
      cfg.calibration_sleeps = s.timing.calibration_sleeps;
      cfg.calibration_pairs = s.timing.calibration_pairs;
      cfg.sample_retries = s.timing.sample_retries;
      cfg.peer_timeout = s.timing.peer_timeout;
      cfg.ta_timeout = s.timing.ta_timeout;
      cfg.calibration_bias_ppm = spec.calibration_bias_ppm;
      r.host = std::make_unique<Host>(*this, id);
      r.node = std::make_unique<protocol::TriadNode>(cfg, *r.host);
    }

    for (std::size_t i = 0; i < s.switches.size(); ++i) {
      Payload p;
      p.control = Control::RegimeSwitch;
      p.id = i;
      engine_.schedule(at(s.switches[i].at), s.switches[i].node, sim::EventKind::Control, p);
    }
    for (std::size_t i = 0; i < s.attacks.size(); ++i) {
      const auto& a = s.attacks[i];
      if (!a.uses_aex() && !a.uses_tsc()) continue;
      Payload p;
      p.control = Control::AttackActivate;
      p.id = i;
      engine_.schedule(a.active_from, a.node, sim::EventKind::Control, p);
    }

    Payload sample;
    sample.control = Control::Sample;
    engine_.schedule(ReferenceTime{}, kTimeAuthority, sim::EventKind::Control, sample);

    for (auto& r : nodes_) {
      r.node->start();
      schedule_next_aex(r);
      schedule_false_alarm(r);
    }
  }

  void schedule_timer(NodeRuntime& r, protocol::TimerId tid, TimerEntry& entry) {
    const ReferenceTime due = r.tsc.first_time_reaching(entry.target, engine_.now());
    entry.event.reset();
    if (due == ReferenceTime::max() || due > trace_.horizon) return;
    Payload p;
    p.id = tid;
    entry.event = engine_.schedule(due, r.id, sim::EventKind::Timer, p);
  }

  void reschedule_timers(NodeRuntime& r) {
    for (auto& [tid, entry] : r.timers) {
      if (entry.event) engine_.cancel(*entry.event);
      schedule_timer(r, tid, entry);
    }
  }

  void schedule_next_aex(NodeRuntime& r) {
    if (r.next_aex_event) engine_.cancel(*r.next_aex_event);
    r.next_aex_event.reset();
    r.next_aex_time.reset();
    const ReferenceTime now = engine_.now();
    auto next = clock::next_aex(r.aex, now, *r.aex_stream);
    if (!next) return;
    const Duration delay = *next - now;
    trace_.aex_delay_hist[r.id][delay.count() / 1'000'000 * 1'000'000] += 1;
    if (*next > trace_.horizon) return;
    r.next_aex_time = *next;
    r.next_aex_event = engine_.schedule(*next, r.id, sim::EventKind::Aex, Payload{});
  }

  void schedule_false_alarm(NodeRuntime& r) {
    const double p = r.monitor.false_alarm_probability();
    if (!(p > 0.0)) return;
    const ReferenceTime now = engine_.now();
    const Duration window = r.tsc.time_to_advance(r.monitor.window_ticks, now);
    if (window <= Duration::zero() || window == Duration::max()) return;
    // Number of honest windows until the next false alarm (geometric).
    const double u = r.monitor_stream->uniform01();
    const long double windows =
        p >= 1.0 ? 1.0L : std::floor(std::log1p(-u) / std::log1p(-p)) + 1.0L;
    const long double offset_ns = windows * static_cast<long double>(window.count());
    if (offset_ns > static_cast<long double>((trace_.horizon - now).count())) return;
    Payload pl;
    pl.control = Control::FalseAlarm;
    engine_.schedule(now + Duration{static_cast<std::int64_t>(offset_ns)}, r.id, sim::EventKind::Control, pl);
  }

  ScenarioRecord make_record(NodeRuntime& r, NodeState state, std::optional<Timestamp> served) {
    ScenarioRecord rec;
    rec.t = engine_.now();
    rec.node = r.id;
    rec.state = state;
    rec.node_time = r.node->reading();
    rec.served = served;
    rec.cum_aex = trace_.aex_counts[r.id - 1];
    rec.cum_ta_ref = r.node->ta_references();
    rec.epoch = r.epoch;
    return rec;
  }

  void sample_all() {
    for (auto& r : nodes_) {
      const auto served = r.node->serve_timestamp();
      if (served) {
        ++trace_.served_count[r.id - 1];
        if (r.last_served && *served <= *r.last_served) ++trace_.monotonic_violations[r.id - 1];
        r.last_served = served;
      }
      if (options_.keep_records) trace_.records.push_back(make_record(r, r.node->state(), served));
    }
    const ReferenceTime next = engine_.now() + trace_.scenario.sample_interval;
    if (next <= trace_.horizon) {
      Payload p;
      p.control = Control::Sample;
      engine_.schedule(next, kTimeAuthority, sim::EventKind::Control, p);
    }
  }

  void deliver_aex(NodeRuntime& r) {
    ++trace_.aex_counts[r.id - 1];
    r.last_aex = engine_.now();
    r.node->on_aex();
  }

  void resume_check(NodeRuntime& r) {
    if (!r.pending_scale_check) return;
    const auto outcome = clock::monitor_window(r.monitor, r.tsc, engine_.now(), r.next_aex_time, *r.monitor_stream);
    if (outcome.verdict == clock::MonitorVerdict::Interrupted) return;
    r.pending_scale_check = false;
    if (outcome.verdict == clock::MonitorVerdict::Discrepancy) schedule_detection(r, outcome);
  }

  void schedule_detection(NodeRuntime& r, const clock::MonitorOutcome& outcome) {
    Payload p;
    p.control = Control::MonitorDetect;
    p.value = outcome.observed_count;
    const ReferenceTime due = outcome.window_end > engine_.now() ? outcome.window_end : engine_.now();
    engine_.schedule(due, r.id, sim::EventKind::Control, p);
  }

  void on_aex_event(NodeRuntime& r) {
    r.next_aex_event.reset();
    deliver_aex(r);
    schedule_next_aex(r);
    resume_check(r);
    const double p = r.aex.correlated_probability;
    if (p > 0.0 && r.corr_stream->bernoulli(p)) {
      for (auto& other : nodes_) {
        if (other.id == r.id) continue;
        deliver_aex(other);
        schedule_next_aex(other);
        resume_check(other);
      }
    }
  }

  void manipulate_tsc(NodeRuntime& r, const attacks::AttackPolicy& a) {
    const ReferenceTime now = engine_.now();
    const Duration honest_window = r.tsc.time_to_advance(r.monitor.window_ticks, now);
    std::optional<Ticks> offset;
    std::optional<double> scale;
    if (a.kind == attacks::AttackKind::TscOffset) offset = a.tsc_offset;
    if (a.kind == attacks::AttackKind::TscScale) scale = a.tsc_scale;
    const double before = effective_rate(r.tsc.current());
    const auto model = attacks::tsc_manipulate(true, r.tsc, now, offset, scale);
    const bool rate_changed = effective_rate(model) != before;
    reschedule_timers(r);

    if (a.tsc_during_exit) {
      // The OS exits the enclave to reprogram the counter; no window spans
      // the change.
      r.pending_scale_check = rate_changed;
      deliver_aex(r);
      resume_check(r);
      return;
    }
    if (r.state == NodeState::Tainted) {
      // The monitoring window was discarded by the AEX that tainted the node.
      r.pending_scale_check = rate_changed;
      return;
    }
    // The monitoring window in flight straddles the change.
    const Duration half = honest_window / 2;
    ReferenceTime start = now.since_epoch() > half ? now + (-half) : ReferenceTime{};
    if (start < r.last_aex) start = r.last_aex;
    const auto outcome = clock::monitor_window(r.monitor, r.tsc, start, r.next_aex_time, *r.monitor_stream);
    if (outcome.verdict == clock::MonitorVerdict::Discrepancy) {
      schedule_detection(r, outcome);
    } else if (outcome.verdict == clock::MonitorVerdict::Interrupted) {
      r.pending_scale_check = rate_changed;
    }
  }

  void on_control(const SimEngine::Event& e) {
    const Scenario& s = trace_.scenario;
    switch (e.payload.control) {
      case Control::Sample:
        sample_all();
        break;
      case Control::RegimeSwitch: {
        NodeRuntime& r = rt(e.target);
        r.aex = s.switches[e.payload.id].schedule;
        schedule_next_aex(r);
        break;
      }
      case Control::AttackActivate: {
        const auto& a = s.attacks[e.payload.id];
        NodeRuntime& r = rt(a.node);
        if (a.uses_aex()) {
          r.aex = attacks::aex_shape(true,
                                     a.kind == attacks::AttackKind::AexSuppress ? attacks::AexMode::Suppress
                                                                                 : attacks::AexMode::Flood,
                                     a.flood_rate_hz);
          schedule_next_aex(r);
        } else if (a.uses_tsc()) {
          manipulate_tsc(r, a);
        }
        break;
      }
      case Control::TaSend:
        route(e.payload.msg);
        break;
      case Control::MonitorDetect: {
        NodeRuntime& r = rt(e.target);
        r.pending_scale_check = false;
        r.monitor.calibrate(effective_rate(r.tsc.current()));
        trace_.detections.push_back({engine_.now(), r.id, DetectionCause::TscManipulation, e.payload.value});
        r.node->on_discrepancy();
        break;
      }
      case Control::FalseAlarm: {
        NodeRuntime& r = rt(e.target);
        trace_.detections.push_back({engine_.now(), r.id, DetectionCause::FalseAlarm, 0.0});
        r.node->on_discrepancy();
        schedule_false_alarm(r);
        break;
      }
    }
  }

  void handle(const SimEngine::Event& e) {
    switch (e.kind) {
      case sim::EventKind::Aex:
        on_aex_event(rt(e.target));
        break;
      case sim::EventKind::MessageDelivery:
        if (e.target == kTimeAuthority) {
          auto reply = ta_.handle(e.payload.msg, engine_.now());
          if (!reply) break;
          if (reply->after == Duration::zero()) {
            route(reply->message);
          } else {
            Payload p;
            p.control = Control::TaSend;
            p.msg = reply->message;
            engine_.schedule_after(reply->after, kTimeAuthority, sim::EventKind::Control, p);
          }
        } else {
          rt(e.target).node->on_message(e.payload.msg);
        }
        break;
      case sim::EventKind::Timer: {
        NodeRuntime& r = rt(e.target);
        auto it = r.timers.find(e.payload.id);
        if (it == r.timers.end()) break;
        const TimerEntry entry = it->second;
        r.timers.erase(it);
        r.node->on_timer(entry.purpose, entry.token);
        break;
      }
      case sim::EventKind::SampleWindowEnd:
        break;
      case sim::EventKind::Control:
        on_control(e);
        break;
    }
  }

  RunOptions options_;
  SimEngine engine_;
  transport::Network network_;
  protocol::TimeAuthority ta_;
  std::vector<NodeRuntime> nodes_;
  protocol::TimerId timer_ids_ = 0;
  Trace trace_;
};

Ticks Host::read_tsc() { return sim_.read_tsc(id_); }
void Host::send(const ProtocolMessage& msg) { sim_.route(msg); }
protocol::TimerId Host::arm_timer(Ticks ticks, TimerPurpose purpose, std::uint64_t token) {
  return sim_.arm_timer(id_, ticks, purpose, token);
}
void Host::cancel_timer(protocol::TimerId id) { sim_.cancel_timer(id_, id); }
void Host::on_transition(std::optional<NodeState> from, NodeState to) { sim_.on_transition(id_, from, to); }
void Host::on_jump(const protocol::JumpEvent& jump) { sim_.on_jump(id_, jump); }
void Host::on_speed_calibrated(const protocol::SpeedCalibration& result) {
  sim_.on_speed_calibrated(id_, result);
}

}  // namespace

Trace simulate(const Scenario& scenario, const RunOptions& options) {
  scenario.validate();
  Simulation sim(scenario, options);
  return sim.run();
}

}  // namespace triad::experiments
