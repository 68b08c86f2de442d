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

#include "triad/transport/network.hpp"

#include <algorithm>

#include "triad/sim/error.hpp"

namespace triad::transport {

void LinkModel::validate() const {
  if (a == b) throw ConfigError("link endpoints must differ");
  if (base_delay < Duration::zero()) throw ConfigError("link base_delay is negative");
  sim::validate(jitter);
  if (!(loss_probability >= 0.0 && loss_probability <= 1.0))
    throw ConfigError("link loss_probability outside [0, 1]");
}

SleepClassifier::SleepClassifier(double accuracy) : accuracy_(accuracy) {
  if (!(accuracy_ >= 0.0 && accuracy_ <= 1.0)) throw ConfigError("classifier accuracy outside [0, 1]");
}

SleepEstimate SleepClassifier::estimate(const protocol::ProtocolMessage& msg,
                                        sim::RngStream& stream) const {
  if (msg.kind != protocol::MessageKind::TaSleepResponse) return std::nullopt;
  if (accuracy_ < 1.0 && !stream.bernoulli(accuracy_)) return std::nullopt;
  return msg.requested_sleep();
}

Network::Network(sim::RngStreams& streams, SleepClassifier classifier)
    : streams_(streams),
      classifier_(std::move(classifier)),
      classifier_stream_(&streams.create("net.classifier")) {}

void Network::add_link(LinkModel link) {
  link.validate();
  const auto k = key(link.a, link.b);
  if (links_.count(k)) {
    throw ConfigError("duplicate link " + std::to_string(k.first) + "-" + std::to_string(k.second));
  }
  const std::string prefix = "net.link." + std::to_string(k.first) + "-" + std::to_string(k.second);
  Link entry{std::move(link), &streams_.create(prefix + ".jitter"), &streams_.create(prefix + ".loss")};
  links_.emplace(k, std::move(entry));
}

bool Network::has_link(EntityId a, EntityId b) const { return links_.count(key(a, b)) > 0; }

const LinkModel& Network::link(EntityId a, EntityId b) const {
  auto it = links_.find(key(a, b));
  if (it == links_.end()) {
    throw ConfigError("no link between " + std::to_string(a) + " and " + std::to_string(b));
  }
  return it->second.model;
}

void Network::mark_compromised(EntityId node) {
  if (node == kTimeAuthority) throw ConfigError("the Time Authority cannot be compromised");
  compromised_.insert(node);
}

void Network::add_hook(EntityId owner, InterpositionHook hook) {
  if (!is_compromised(owner)) {
    throw ConfigError("hook owner " + std::to_string(owner) + " is not a compromised node");
  }
  hooks_.push_back({owner, std::move(hook)});
}

std::optional<Delivery> Network::send(const protocol::ProtocolMessage& msg, ReferenceTime now) {
  auto it = links_.find(key(msg.sender, msg.receiver));
  if (it == links_.end()) {
    throw ConfigError("no link between " + std::to_string(msg.sender) + " and " +
                      std::to_string(msg.receiver));
  }
  ++sent_;
  Link& link = it->second;

  Duration hook_delay{};
  bool adjacent = false;
  for (const Hook& h : hooks_) adjacent |= (h.owner == msg.sender || h.owner == msg.receiver);
  if (adjacent) {
    const AttackerView view = observe(msg, now);
    const SleepEstimate estimate = classifier_.estimate(msg, *classifier_stream_);
    for (const Hook& h : hooks_) {
      if (h.owner != msg.sender && h.owner != msg.receiver) continue;
      const HookAction action = h.fn(view, estimate);
      if (action.verdict == HookVerdict::Drop) {
        ++dropped_;
        return std::nullopt;
      }
      if (action.verdict == HookVerdict::Delay) {
        if (action.delay < Duration::zero()) throw ConfigError("hook returned a negative delay");
        hook_delay += action.delay;
      }
    }
  }

  if (link.model.loss_probability > 0.0 && link.loss->bernoulli(link.model.loss_probability)) {
    ++dropped_;
    return std::nullopt;
  }
  const Duration jitter = sim::sample_duration(link.model.jitter, *link.jitter);
  return Delivery{now + hook_delay + link.model.base_delay + jitter, hook_delay};
}

}  // namespace triad::transport
