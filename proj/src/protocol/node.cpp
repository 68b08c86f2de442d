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

#include "triad/protocol/node.hpp"

#include <algorithm>

#include "triad/sim/error.hpp"

namespace triad::protocol {

const char* to_string(NodeState state) {
  switch (state) {
    case NodeState::FullCalib: return "FullCalib";
    case NodeState::RefCalib: return "RefCalib";
    case NodeState::Tainted: return "Tainted";
    case NodeState::OK: return "OK";
  }
  return "?";
}

void NodeConfig::validate() const {
  if (id == kTimeAuthority) throw ConfigError("node id 0 is reserved for the Time Authority");
  if (std::find(peers.begin(), peers.end(), id) != peers.end())
    throw ConfigError("node lists itself as a peer");
  if (std::find(peers.begin(), peers.end(), kTimeAuthority) != peers.end())
    throw ConfigError("the Time Authority cannot be a peer");
  if (calibration_sleeps.size() < 2) throw ConfigError("calibration needs at least two sleep values");
  for (auto s : calibration_sleeps)
    if (s < Duration::zero()) throw ConfigError("negative calibration sleep");
  if (calibration_pairs == 0) throw ConfigError("calibration_pairs must be positive");
  if (peer_timeout <= Duration::zero()) throw ConfigError("peer_timeout must be positive");
  if (ta_timeout <= Duration::zero()) throw ConfigError("ta_timeout must be positive");
  if (!(nominal_tsc_hz > 0.0)) throw ConfigError("nominal TSC frequency must be positive");
  if (!(calibration_bias_ppm > -1e6)) throw ConfigError("calibration bias would make F_calib non-positive");
}

TriadNode::TriadNode(NodeConfig config, NodeContext& context)
    : config_(std::move(config)), ctx_(context) {
  config_.validate();
}

void TriadNode::start() {
  if (started_) return;
  started_ = true;
  ctx_.on_transition(std::nullopt, NodeState::FullCalib);
  state_ = NodeState::FullCalib;
  begin_full_calibration();
}

void TriadNode::transition(NodeState to) {
  if (to == state_) return;
  const NodeState from = state_;
  state_ = to;
  ctx_.on_transition(from, to);
}

double TriadNode::timer_rate() const {
  return clock_.f_calib > 0.0 ? clock_.f_calib : config_.nominal_tsc_hz;
}

Ticks TriadNode::ticks_for(Duration perceived) const {
  return perceived_to_ticks(perceived, timer_rate());
}

void TriadNode::clear_timer() {
  if (timer_) ctx_.cancel_timer(*timer_);
  timer_.reset();
}

// --- Full calibration -------------------------------------------------------

void TriadNode::begin_full_calibration() {
  clear_timer();
  peer_nonces_.clear();
  pre_aex_.reset();
  clock_.tainted = true;
  transition(NodeState::FullCalib);
  phase_ = CalibPhase::SpeedSamples;
  plan_.clear();
  for (std::uint32_t i = 0; i < config_.calibration_pairs; ++i) {
    for (auto s : config_.calibration_sleeps) plan_.push_back(s);
  }
  slot_ = 0;
  attempt_ = 0;
  batch_.clear();
  ++batches_;
  send_next_sample();
}

void TriadNode::send_next_sample() {
  if (slot_ >= plan_.size()) {
    finish_speed_calibration();
    return;
  }
  const Duration sleep = plan_[slot_];
  pending_nonce_ = ctx_.fresh_nonce();
  pending_send_tsc_ = ctx_.read_tsc();
  ctx_.send(make_sleep_request(config_.id, pending_nonce_, sleep));
  timer_ = ctx_.arm_timer(ticks_for(sleep + config_.ta_timeout), TimerPurpose::CalibrationSample,
                          pending_nonce_);
}

void TriadNode::finish_speed_calibration() {
  RegressionFit fit;
  try {
    fit = fit_calibration(batch_);
  } catch (const InsufficientData&) {
    begin_full_calibration();
    return;
  } catch (const SingularRegression&) {
    begin_full_calibration();
    return;
  }
  SpeedCalibration result;
  result.raw_slope_hz = fit.slope_hz;
  result.f_calib = fit.slope_hz * (1.0 + config_.calibration_bias_ppm * 1e-6);
  result.valid_samples = fit.samples_used;
  result.total_samples = batch_.size();
  result.batches = batches_;
  if (!(result.f_calib > 0.0)) {
    begin_full_calibration();
    return;
  }
  batches_ = 0;
  clock_.f_calib = result.f_calib;
  ctx_.on_speed_calibrated(result);
  phase_ = CalibPhase::Reference;
  send_ref_request();
}

// --- Reference calibration --------------------------------------------------

void TriadNode::send_ref_request() {
  clear_timer();
  pending_nonce_ = ctx_.fresh_nonce();
  ctx_.send(make_ref_request(config_.id, pending_nonce_));
  timer_ = ctx_.arm_timer(ticks_for(config_.ta_timeout), TimerPurpose::TaReference, pending_nonce_);
}

void TriadNode::complete_reference(const ProtocolMessage& msg) {
  clear_timer();
  pending_nonce_ = 0;
  JumpEvent jump;
  jump.source = kTimeAuthority;
  if (anchored_) jump.pre = reading();
  clock_.anchor_ref = msg.timestamp();
  clock_.anchor_tsc = ctx_.read_tsc();
  clock_.tainted = false;
  anchored_ = true;
  pre_aex_.reset();
  jump.post = clock_.anchor_ref;
  jump.payload = msg.timestamp();
  ++ta_references_;
  ctx_.on_jump(jump);
  transition(NodeState::OK);
}

// --- Taint / untaint ---------------------------------------------------------

void TriadNode::issue_peer_requests() {
  clear_timer();
  peer_nonces_.clear();
  for (EntityId peer : config_.peers) {
    const std::uint64_t nonce = ctx_.fresh_nonce();
    peer_nonces_.push_back(nonce);
    ctx_.send(make_peer_request(config_.id, peer, nonce));
  }
  const std::uint64_t token = peer_nonces_.empty() ? ctx_.fresh_nonce() : peer_nonces_.front();
  timer_ = ctx_.arm_timer(config_.peers.empty() ? 0 : ticks_for(config_.peer_timeout),
                          TimerPurpose::PeerResponse, token);
}

void TriadNode::on_aex() {
  switch (state_) {
    case NodeState::OK: {
      Timestamp local = estimate_now(clock_, std::max(ctx_.read_tsc(), clock_.anchor_tsc));
      if (clock_.last_served && *clock_.last_served > local) local = *clock_.last_served;
      pre_aex_ = local;
      clock_.tainted = true;
      transition(NodeState::Tainted);
      issue_peer_requests();
      break;
    }
    case NodeState::Tainted:
      issue_peer_requests();
      break;
    case NodeState::FullCalib:
      if (phase_ == CalibPhase::SpeedSamples) {
        if (pending_nonce_ != 0 && slot_ < plan_.size()) {
          clear_timer();
          batch_.push_back({plan_[slot_], 0, false});
          pending_nonce_ = 0;
          ++slot_;
          attempt_ = 0;
          send_next_sample();
        }
      } else {
        send_ref_request();
      }
      break;
    case NodeState::RefCalib:
      send_ref_request();
      break;
  }
}

void TriadNode::handle_peer_request(const ProtocolMessage& msg) {
  if (state_ != NodeState::OK) return;
  const Ticks now = ctx_.read_tsc();
  if (now < clock_.anchor_tsc) return;
  ctx_.send(make_peer_response(msg, estimate_now(clock_, now)));
}

void TriadNode::handle_peer_response(const ProtocolMessage& msg) {
  if (state_ != NodeState::Tainted) return;
  if (std::find(peer_nonces_.begin(), peer_nonces_.end(), msg.nonce) == peer_nonces_.end()) return;

  JumpEvent jump;
  jump.source = msg.sender;
  jump.pre = reading();
  jump.payload = msg.timestamp();
  const Timestamp local = pre_aex_.value_or(jump.pre.value_or(Timestamp{}));
  jump.local_before_aex = local;
  jump.adopted = jump.payload > local;
  clock_.anchor_ref = jump.adopted ? jump.payload : local + kOneNanosecond;
  clock_.anchor_tsc = ctx_.read_tsc();
  clock_.tainted = false;
  jump.post = clock_.anchor_ref;

  clear_timer();
  peer_nonces_.clear();
  pre_aex_.reset();
  ++peer_untaints_;
  ctx_.on_jump(jump);
  transition(NodeState::OK);
}

void TriadNode::on_peer_timeout() {
  peer_nonces_.clear();
  transition(NodeState::RefCalib);
  send_ref_request();
}

// --- Dispatch ----------------------------------------------------------------

void TriadNode::on_message(const ProtocolMessage& msg) {
  if (msg.receiver != config_.id) return;
  switch (msg.kind) {
    case MessageKind::PeerTimeRequest:
      handle_peer_request(msg);
      break;
    case MessageKind::PeerTimeResponse:
      handle_peer_response(msg);
      break;
    case MessageKind::TaSleepResponse:
      if (state_ == NodeState::FullCalib && phase_ == CalibPhase::SpeedSamples &&
          msg.nonce == pending_nonce_ && pending_nonce_ != 0) {
        clear_timer();
        batch_.push_back({plan_[slot_], ctx_.read_tsc() - pending_send_tsc_, true});
        pending_nonce_ = 0;
        ++slot_;
        attempt_ = 0;
        send_next_sample();
      }
      break;
    case MessageKind::TaRefResponse:
      if (pending_nonce_ != 0 && msg.nonce == pending_nonce_ &&
          ((state_ == NodeState::FullCalib && phase_ == CalibPhase::Reference) ||
           state_ == NodeState::RefCalib)) {
        complete_reference(msg);
      }
      break;
    case MessageKind::TaSleepRequest:
    case MessageKind::TaRefRequest:
      break;
  }
}

void TriadNode::on_timer(TimerPurpose purpose, std::uint64_t token) {
  switch (purpose) {
    case TimerPurpose::CalibrationSample:
      if (state_ != NodeState::FullCalib || phase_ != CalibPhase::SpeedSamples ||
          token != pending_nonce_ || pending_nonce_ == 0)
        return;
      timer_.reset();
      pending_nonce_ = 0;
      if (++attempt_ > config_.sample_retries) {
        batch_.push_back({plan_[slot_], 0, false});
        ++slot_;
        attempt_ = 0;
      }
      send_next_sample();
      break;
    case TimerPurpose::TaReference:
      if (token != pending_nonce_ || pending_nonce_ == 0) return;
      if (state_ == NodeState::RefCalib ||
          (state_ == NodeState::FullCalib && phase_ == CalibPhase::Reference)) {
        timer_.reset();
        send_ref_request();
      }
      break;
    case TimerPurpose::PeerResponse: {
      if (state_ != NodeState::Tainted) return;
      const bool current = peer_nonces_.empty() ? true : token == peer_nonces_.front();
      if (!current) return;
      timer_.reset();
      on_peer_timeout();
      break;
    }
  }
}

void TriadNode::on_discrepancy() {
  if (!started_) return;
  begin_full_calibration();
}

// --- Serving -------------------------------------------------------------------

std::optional<Timestamp> TriadNode::serve_timestamp() {
  if (state_ != NodeState::OK) return std::nullopt;
  const Ticks now = ctx_.read_tsc();
  if (now < clock_.anchor_tsc) return std::nullopt;
  Timestamp t = estimate_now(clock_, now);
  if (clock_.last_served && t <= *clock_.last_served) t = *clock_.last_served + kOneNanosecond;
  clock_.last_served = t;
  return t;
}

std::optional<Timestamp> TriadNode::reading() {
  if (!anchored_ || !(clock_.f_calib > 0.0)) return std::nullopt;
  const Ticks now = ctx_.read_tsc();
  if (now < clock_.anchor_tsc) return clock_.anchor_ref;
  return estimate_now(clock_, now);
}

}  // namespace triad::protocol
