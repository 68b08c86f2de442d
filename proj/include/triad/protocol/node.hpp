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
#include <optional>
#include <vector>

#include "triad/protocol/calibration.hpp"
#include "triad/protocol/messages.hpp"
#include "triad/protocol/node_clock.hpp"

namespace triad::protocol {

using namespace std::chrono_literals;

enum class NodeState : std::uint8_t { FullCalib, RefCalib, Tainted, OK };

inline constexpr std::size_t kNodeStateCount = 4;

const char* to_string(NodeState state);

enum class TimerPurpose : std::uint8_t { CalibrationSample, TaReference, PeerResponse };

using TimerId = std::uint64_t;

/// A node adopting (or refusing) a new time reference.
struct JumpEvent {
  EntityId source = kTimeAuthority;
  /// Extrapolated reading just before the change; empty on first anchoring.
  std::optional<Timestamp> pre;
  Timestamp post{};
  /// What the peer or TA sent.
  Timestamp payload{};
  /// Pre-AEX timestamp the peer payload was compared with (peer untaints only).
  std::optional<Timestamp> local_before_aex;
  bool adopted = true;

  std::optional<Duration> magnitude() const {
    if (!pre) return std::nullopt;
    return post - *pre;
  }
};

struct SpeedCalibration {
  double f_calib = 0.0;
  double raw_slope_hz = 0.0;
  std::size_t valid_samples = 0;
  std::size_t total_samples = 0;
  std::uint32_t batches = 0;
};

struct NodeConfig {
  EntityId id = 1;
  std::vector<EntityId> peers;
  /// Sleep values requested from the TA during speed calibration; each
  /// calibration pair issues one request per value.
  std::vector<Duration> calibration_sleeps{0s, 1s};
  std::uint32_t calibration_pairs = 8;
  /// Resends per sample after a lost response.
  std::uint32_t sample_retries = 3;
  /// Node-perceived wait for any peer response before asking the TA.
  Duration peer_timeout = 200ms;
  /// Node-perceived wait for a TA response (added to the requested sleep).
  Duration ta_timeout = 200ms;
  /// TSC frequency the OS measured at boot; only used to time out requests
  /// before the first calibration.
  double nominal_tsc_hz = 2.9e9;
  /// Systematic calibration error applied to the regression result.
  double calibration_bias_ppm = 0.0;

  void validate() const;
};

/// The node's side effects. The simulator implements this with its event
/// engine; tests implement it with a scripted fake.
class NodeContext {
 public:
  virtual ~NodeContext() = default;

  virtual Ticks read_tsc() = 0;
  virtual void send(const ProtocolMessage& msg) = 0;
  /// Fires `on_timer(purpose, token)` after the TSC advances by `ticks`.
  virtual TimerId arm_timer(Ticks ticks, TimerPurpose purpose, std::uint64_t token) = 0;
  virtual void cancel_timer(TimerId id) = 0;
  virtual std::uint64_t fresh_nonce() = 0;

  virtual void on_transition(std::optional<NodeState> /*from*/, NodeState /*to*/) {}
  virtual void on_jump(const JumpEvent& /*jump*/) {}
  virtual void on_speed_calibrated(const SpeedCalibration& /*result*/) {}
};

/// Triad node state machine: speed calibration by regression against TA
/// sleeps, reference calibration, taint on AEX, untaint from peers or the TA,
/// and monotonic timestamp serving.
class TriadNode {
 public:
  TriadNode(NodeConfig config, NodeContext& context);

  TriadNode(const TriadNode&) = delete;
  TriadNode& operator=(const TriadNode&) = delete;

  /// start -> FullCalib.
  void start();

  void on_aex();
  void on_message(const ProtocolMessage& msg);
  void on_timer(TimerPurpose purpose, std::uint64_t token);
  /// Monitor flagged the TSC rate: any state -> FullCalib.
  void on_discrepancy();

  /// Monotonic timestamp for a client; nullopt when the node is not OK.
  std::optional<Timestamp> serve_timestamp();

  /// Current clock belief without serving it; nullopt before the first
  /// calibration. A TSC behind the anchor reads as the anchor.
  std::optional<Timestamp> reading();

  NodeState state() const { return state_; }
  const NodeClock& clock() const { return clock_; }
  const NodeConfig& config() const { return config_; }
  EntityId id() const { return config_.id; }
  std::uint64_t ta_references() const { return ta_references_; }
  std::uint64_t peer_untaints() const { return peer_untaints_; }
  const std::vector<CalibrationSample>& last_batch() const { return batch_; }
  std::optional<Timestamp> pre_aex_timestamp() const { return pre_aex_; }

 private:
  enum class CalibPhase : std::uint8_t { SpeedSamples, Reference };

  void transition(NodeState to);
  void begin_full_calibration();
  void send_next_sample();
  void finish_speed_calibration();
  void send_ref_request();
  void complete_reference(const ProtocolMessage& msg);
  void handle_peer_request(const ProtocolMessage& msg);
  void handle_peer_response(const ProtocolMessage& msg);
  void on_peer_timeout();
  void issue_peer_requests();
  void clear_timer();
  double timer_rate() const;
  Ticks ticks_for(Duration perceived) const;

  NodeConfig config_;
  NodeContext& ctx_;
  NodeState state_ = NodeState::FullCalib;
  bool started_ = false;
  NodeClock clock_;
  bool anchored_ = false;

  // Calibration.
  CalibPhase phase_ = CalibPhase::SpeedSamples;
  std::vector<Duration> plan_;
  std::size_t slot_ = 0;
  std::uint32_t attempt_ = 0;
  std::uint32_t batches_ = 0;
  std::vector<CalibrationSample> batch_;
  std::uint64_t pending_nonce_ = 0;
  Ticks pending_send_tsc_ = 0;

  // Taint handling.
  std::optional<Timestamp> pre_aex_;
  std::vector<std::uint64_t> peer_nonces_;

  std::optional<TimerId> timer_;
  std::uint64_t ta_references_ = 0;
  std::uint64_t peer_untaints_ = 0;
};

}  // namespace triad::protocol
