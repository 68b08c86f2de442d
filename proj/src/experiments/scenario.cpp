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

#include "triad/experiments/scenario.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <initializer_list>
#include <set>
#include <sstream>

#include "triad/sim/error.hpp"

namespace triad::experiments {

using nlohmann::json;

namespace {

struct Unit {
  std::string_view suffix;
  std::int64_t ns;
};

// Longest suffixes first so "ms" is not read as "s".
constexpr Unit kUnits[] = {{"min", 60'000'000'000}, {"ns", 1},
                           {"us", 1'000},           {"ms", 1'000'000},
                           {"s", 1'000'000'000},    {"h", 3'600'000'000'000}};

constexpr Unit kFormatUnits[] = {{"h", 3'600'000'000'000}, {"min", 60'000'000'000},
                                 {"s", 1'000'000'000},     {"ms", 1'000'000},
                                 {"us", 1'000},            {"ns", 1}};

[[noreturn]] void fail(const std::string& path, const std::string& what) {
  throw ValidationError(path, what);
}

std::string at_key(const std::string& path, std::string_view key) {
  return path.empty() ? std::string(key) : path + "." + std::string(key);
}

std::string at_index(const std::string& path, std::size_t i) {
  return path + "[" + std::to_string(i) + "]";
}

void check_object(const json& v, const std::string& path, std::initializer_list<std::string_view> allowed) {
  if (!v.is_object()) fail(path, "expected an object");
  for (const auto& [key, _] : v.items()) {
    if (std::find(allowed.begin(), allowed.end(), key) == allowed.end()) {
      fail(at_key(path, key), "unknown field");
    }
  }
}

const json& require(const json& obj, std::string_view key, const std::string& path) {
  auto it = obj.find(std::string(key));
  if (it == obj.end()) fail(at_key(path, key), "missing required field");
  return *it;
}

Duration read_duration(const json& v, const std::string& path) {
  try {
    if (v.is_number_integer()) return Duration{v.get<std::int64_t>()};
    if (v.is_string()) return parse_duration(v.get<std::string>());
  } catch (const ConfigError& e) {
    fail(path, e.what());
  }
  fail(path, "expected a duration (integer nanoseconds or a string such as \"100ms\")");
}

double read_number(const json& v, const std::string& path) {
  if (!v.is_number()) fail(path, "expected a number");
  return v.get<double>();
}

std::uint64_t read_unsigned(const json& v, const std::string& path) {
  if (!v.is_number_integer() || (v.is_number_integer() && !v.is_number_unsigned() && v.get<std::int64_t>() < 0)) {
    fail(path, "expected a non-negative integer");
  }
  return v.get<std::uint64_t>();
}

std::int64_t read_integer(const json& v, const std::string& path) {
  if (!v.is_number_integer()) fail(path, "expected an integer");
  return v.get<std::int64_t>();
}

EntityId read_entity(const json& v, const std::string& path) {
  const std::uint64_t id = read_unsigned(v, path);
  if (id > 0xffff) fail(path, "entity id out of range");
  return static_cast<EntityId>(id);
}

std::string read_string(const json& v, const std::string& path) {
  if (!v.is_string()) fail(path, "expected a string");
  return v.get<std::string>();
}

bool read_bool(const json& v, const std::string& path) {
  if (!v.is_boolean()) fail(path, "expected a boolean");
  return v.get<bool>();
}

sim::DurationDistribution read_distribution(const json& v, const std::string& path) {
  if (!v.is_object() || v.size() != 1) {
    fail(path, "expected exactly one of {\"constant\"}, {\"uniform\"}, {\"discrete\"}");
  }
  const auto& [kind, body] = *v.items().begin();
  const std::string sub = at_key(path, kind);
  if (kind == "constant") return sim::ConstantDelay{read_duration(body, sub)};
  if (kind == "uniform") {
    if (!body.is_array() || body.size() != 2) fail(sub, "expected [lo, hi]");
    return sim::UniformDelay{read_duration(body[0], at_index(sub, 0)), read_duration(body[1], at_index(sub, 1))};
  }
  if (kind == "discrete") {
    check_object(body, sub, {"atoms", "weights"});
    sim::DiscreteDelay d;
    const json& atoms = require(body, "atoms", sub);
    if (!atoms.is_array()) fail(at_key(sub, "atoms"), "expected an array");
    for (std::size_t i = 0; i < atoms.size(); ++i) {
      d.atoms.push_back(read_duration(atoms[i], at_index(at_key(sub, "atoms"), i)));
    }
    if (auto it = body.find("weights"); it != body.end()) {
      if (!it->is_array()) fail(at_key(sub, "weights"), "expected an array");
      for (std::size_t i = 0; i < it->size(); ++i) {
        d.weights.push_back(read_number((*it)[i], at_index(at_key(sub, "weights"), i)));
      }
    } else {
      d.weights.assign(d.atoms.size(), 1.0);
    }
    return d;
  }
  fail(sub, "unknown distribution kind");
}

json distribution_to_json(const sim::DurationDistribution& dist) {
  return std::visit(
      [](const auto& d) -> json {
        using T = std::decay_t<decltype(d)>;
        if constexpr (std::is_same_v<T, sim::ConstantDelay>) {
          return {{"constant", format_duration(d.value)}};
        } else if constexpr (std::is_same_v<T, sim::UniformDelay>) {
          return {{"uniform", {format_duration(d.lo), format_duration(d.hi)}}};
        } else {
          json atoms = json::array();
          for (auto a : d.atoms) atoms.push_back(format_duration(a));
          return {{"discrete", {{"atoms", atoms}, {"weights", d.weights}}}};
        }
      },
      dist);
}

clock::AexSchedule read_aex(const json& v, const std::string& path) {
  check_object(v, path, {"regime", "delays", "correlated_probability"});
  clock::AexSchedule s;
  const std::string regime_path = at_key(path, "regime");
  try {
    s.regime = clock::parse_aex_regime(read_string(require(v, "regime", path), regime_path));
  } catch (const ConfigError& e) {
    fail(regime_path, e.what());
  }
  if (auto it = v.find("delays"); it != v.end()) {
    if (s.regime != clock::AexRegime::Custom) fail(at_key(path, "delays"), "only the custom regime takes delays");
    s.custom = read_distribution(*it, at_key(path, "delays"));
  } else if (s.regime == clock::AexRegime::Custom) {
    fail(at_key(path, "delays"), "custom regime requires delays");
  }
  if (auto it = v.find("correlated_probability"); it != v.end()) {
    s.correlated_probability = read_number(*it, at_key(path, "correlated_probability"));
  }
  return s;
}

json aex_to_json(const clock::AexSchedule& s) {
  json out{{"regime", clock::to_string(s.regime)}};
  if (s.regime == clock::AexRegime::Custom) out["delays"] = distribution_to_json(s.custom);
  if (s.correlated_probability != 0.0) out["correlated_probability"] = s.correlated_probability;
  return out;
}

LinkSpec read_link(const json& v, const std::string& path, LinkSpec base) {
  check_object(v, path, {"base_delay", "jitter", "loss_probability"});
  if (auto it = v.find("base_delay"); it != v.end()) base.base_delay = read_duration(*it, at_key(path, "base_delay"));
  if (auto it = v.find("jitter"); it != v.end()) base.jitter = read_distribution(*it, at_key(path, "jitter"));
  if (auto it = v.find("loss_probability"); it != v.end())
    base.loss_probability = read_number(*it, at_key(path, "loss_probability"));
  return base;
}

json link_to_json(const LinkSpec& l) {
  return {{"base_delay", format_duration(l.base_delay)},
          {"jitter", distribution_to_json(l.jitter)},
          {"loss_probability", l.loss_probability}};
}

transport::HookAction read_action(const json& v, const std::string& path) {
  if (v.is_string()) {
    const auto s = v.get<std::string>();
    if (s == "pass") return transport::HookAction::pass();
    if (s == "drop") return transport::HookAction::drop();
    fail(path, "expected \"pass\", \"drop\" or {\"delay\": D}");
  }
  check_object(v, path, {"delay"});
  return transport::HookAction::delay_by(read_duration(require(v, "delay", path), at_key(path, "delay")));
}

json action_to_json(const transport::HookAction& a) {
  switch (a.verdict) {
    case transport::HookVerdict::Pass: return "pass";
    case transport::HookVerdict::Drop: return "drop";
    case transport::HookVerdict::Delay: return {{"delay", format_duration(a.delay)}};
  }
  return "pass";
}

attacks::AttackPolicy read_attack(const json& v, const std::string& path) {
  check_object(v, path,
               {"kind", "node", "active_from", "added_delay", "s_threshold", "classifier_accuracy",
                "tsc_offset", "tsc_scale", "tsc_during_exit", "flood_rate_hz", "rules"});
  attacks::AttackPolicy p;
  const std::string kind_path = at_key(path, "kind");
  try {
    p.kind = attacks::parse_attack_kind(read_string(require(v, "kind", path), kind_path));
  } catch (const ConfigError& e) {
    fail(kind_path, e.what());
  }
  p.node = read_entity(require(v, "node", path), at_key(path, "node"));
  if (auto it = v.find("active_from"); it != v.end())
    p.active_from = at(read_duration(*it, at_key(path, "active_from")));
  if (auto it = v.find("added_delay"); it != v.end()) p.added_delay = read_duration(*it, at_key(path, "added_delay"));
  if (auto it = v.find("s_threshold"); it != v.end()) p.s_threshold = read_duration(*it, at_key(path, "s_threshold"));
  if (auto it = v.find("classifier_accuracy"); it != v.end())
    p.classifier_accuracy = read_number(*it, at_key(path, "classifier_accuracy"));
  if (auto it = v.find("tsc_offset"); it != v.end()) p.tsc_offset = read_integer(*it, at_key(path, "tsc_offset"));
  if (auto it = v.find("tsc_scale"); it != v.end()) p.tsc_scale = read_number(*it, at_key(path, "tsc_scale"));
  if (auto it = v.find("tsc_during_exit"); it != v.end())
    p.tsc_during_exit = read_bool(*it, at_key(path, "tsc_during_exit"));
  if (auto it = v.find("flood_rate_hz"); it != v.end())
    p.flood_rate_hz = read_number(*it, at_key(path, "flood_rate_hz"));
  if (auto it = v.find("rules"); it != v.end()) {
    const std::string rules_path = at_key(path, "rules");
    if (!it->is_array()) fail(rules_path, "expected an array");
    for (std::size_t i = 0; i < it->size(); ++i) {
      const std::string rp = at_index(rules_path, i);
      const json& r = (*it)[i];
      check_object(r, rp, {"sender", "receiver", "high_sleep", "action"});
      attacks::CustomRule rule;
      if (auto f = r.find("sender"); f != r.end()) rule.sender = read_entity(*f, at_key(rp, "sender"));
      if (auto f = r.find("receiver"); f != r.end()) rule.receiver = read_entity(*f, at_key(rp, "receiver"));
      if (auto f = r.find("high_sleep"); f != r.end()) rule.high_sleep = read_bool(*f, at_key(rp, "high_sleep"));
      rule.action = read_action(require(r, "action", rp), at_key(rp, "action"));
      p.rules.push_back(rule);
    }
  }
  return p;
}

json attack_to_json(const attacks::AttackPolicy& p) {
  json out{{"kind", attacks::to_string(p.kind)},
           {"node", p.node},
           {"active_from", format_duration(p.active_from.since_epoch())},
           {"added_delay", format_duration(p.added_delay)},
           {"s_threshold", format_duration(p.s_threshold)},
           {"classifier_accuracy", p.classifier_accuracy},
           {"tsc_offset", p.tsc_offset},
           {"tsc_scale", p.tsc_scale},
           {"tsc_during_exit", p.tsc_during_exit},
           {"flood_rate_hz", p.flood_rate_hz}};
  if (!p.rules.empty()) {
    json rules = json::array();
    for (const auto& r : p.rules) {
      json jr{{"action", action_to_json(r.action)}};
      if (r.sender) jr["sender"] = *r.sender;
      if (r.receiver) jr["receiver"] = *r.receiver;
      if (r.high_sleep) jr["high_sleep"] = *r.high_sleep;
      rules.push_back(jr);
    }
    out["rules"] = rules;
  }
  return out;
}

template <typename Fn>
void rethrow_at(const std::string& path, Fn&& fn) {
  try {
    fn();
  } catch (const ValidationError&) {
    throw;
  } catch (const ConfigError& e) {
    fail(path, e.what());
  }
}

}  // namespace

Duration parse_duration(std::string_view text) {
  std::string s;
  for (char c : text) {
    if (!std::isspace(static_cast<unsigned char>(c))) s.push_back(c);
  }
  std::size_t pos = 0;
  bool negative = false;
  if (pos < s.size() && (s[pos] == '-' || s[pos] == '+')) negative = s[pos++] == '-';
  std::int64_t whole = 0;
  std::int64_t frac = 0;
  std::int64_t frac_scale = 1;
  bool any_digit = false;
  for (; pos < s.size() && std::isdigit(static_cast<unsigned char>(s[pos])); ++pos) {
    if (whole > (INT64_MAX - 9) / 10) throw ConfigError("duration out of range: '" + std::string(text) + "'");
    whole = whole * 10 + (s[pos] - '0');
    any_digit = true;
  }
  if (pos < s.size() && s[pos] == '.') {
    ++pos;
    for (; pos < s.size() && std::isdigit(static_cast<unsigned char>(s[pos])); ++pos) {
      if (frac_scale > 1'000'000'000'000LL) throw ConfigError("too many decimals in '" + std::string(text) + "'");
      frac = frac * 10 + (s[pos] - '0');
      frac_scale *= 10;
      any_digit = true;
    }
  }
  if (!any_digit) throw ConfigError("malformed duration '" + std::string(text) + "'");
  const std::string_view suffix = std::string_view(s).substr(pos);
  for (const Unit& u : kUnits) {
    if (suffix != u.suffix) continue;
    if (whole > INT64_MAX / u.ns) throw ConfigError("duration out of range: '" + std::string(text) + "'");
    const __int128 frac_ns = static_cast<__int128>(frac) * u.ns;
    if (frac_ns % frac_scale != 0) {
      throw ConfigError("duration '" + std::string(text) + "' is not a whole number of nanoseconds");
    }
    const std::int64_t ns = whole * u.ns + static_cast<std::int64_t>(frac_ns / frac_scale);
    return Duration{negative ? -ns : ns};
  }
  throw ConfigError("unknown duration unit in '" + std::string(text) + "' (use ns, us, ms, s, min, h)");
}

std::string format_duration(Duration d) {
  const std::int64_t ns = d.count();
  if (ns == 0) return "0s";
  for (const Unit& u : kFormatUnits) {
    if (ns % u.ns == 0) return std::to_string(ns / u.ns) + std::string(u.suffix);
  }
  return std::to_string(ns) + "ns";
}

void Scenario::validate() const {
  if (name.empty()) fail("name", "must not be empty");
  if (horizon <= Duration::zero()) fail("horizon", "must be positive");
  if (sample_interval <= Duration::zero()) fail("sample_interval", "must be positive");
  if (nodes.empty()) fail("nodes", "at least one node is required");
  if (nodes.size() >= 0xffff) fail("nodes", "too many nodes");
  const auto exists = [&](EntityId id) { return id >= 1 && id <= nodes.size(); };

  for (std::size_t i = 0; i < nodes.size(); ++i) {
    const std::string p = at_index("nodes", i);
    rethrow_at(at_key(p, "aex"), [&] { nodes[i].aex.validate(); });
    if (nodes[i].tsc_hz == 0) fail(at_key(p, "tsc_hz"), "must be positive");
    if (!(nodes[i].calibration_bias_ppm > -1e6)) fail(at_key(p, "calibration_bias_ppm"), "must exceed -1e6");
  }

  const auto check_link = [&](const LinkSpec& l, const std::string& p) {
    if (l.base_delay < Duration::zero()) fail(at_key(p, "base_delay"), "must not be negative");
    rethrow_at(at_key(p, "jitter"), [&] { sim::validate(l.jitter); });
    if (!(l.loss_probability >= 0.0 && l.loss_probability <= 1.0))
      fail(at_key(p, "loss_probability"), "must lie in [0, 1]");
  };
  check_link(links, "links");

  std::set<std::pair<EntityId, EntityId>> seen;
  for (std::size_t i = 0; i < link_overrides.size(); ++i) {
    const std::string p = at_index("link_overrides", i);
    const auto& o = link_overrides[i];
    if (o.a != kTimeAuthority && !exists(o.a)) fail(at_key(p, "a"), "unknown entity " + std::to_string(o.a));
    if (o.b != kTimeAuthority && !exists(o.b)) fail(at_key(p, "b"), "unknown entity " + std::to_string(o.b));
    if (o.a == o.b) fail(at_key(p, "b"), "link endpoints must differ");
    if (!seen.insert(std::minmax(o.a, o.b)).second) fail(p, "duplicate override for this pair");
    check_link(o.link, at_key(p, "link"));
  }

  // One policy per node on each surface: messages, AEXs, TSC.
  std::set<std::pair<EntityId, int>> attacked;
  for (std::size_t i = 0; i < attacks.size(); ++i) {
    const std::string p = at_index("attacks", i);
    const auto& a = attacks[i];
    if (a.kind == attacks::AttackKind::None) continue;
    if (!exists(a.node)) fail(at_key(p, "node"), "unknown node " + std::to_string(a.node));
    const int surface = a.uses_hook() ? 0 : a.uses_aex() ? 1 : 2;
    if (!attacked.insert({a.node, surface}).second)
      fail(at_key(p, "node"), "node already has an attack policy of this type");
    if (a.active_from.since_epoch() >= horizon) fail(at_key(p, "active_from"), "must precede the horizon");
    rethrow_at(p, [&] { a.validate(); });
  }

  for (std::size_t i = 0; i < switches.size(); ++i) {
    const std::string p = at_index("switches", i);
    const auto& s = switches[i];
    if (s.at < Duration::zero() || s.at >= horizon) fail(at_key(p, "at"), "must lie in [0, horizon)");
    if (!exists(s.node)) fail(at_key(p, "node"), "unknown node " + std::to_string(s.node));
    rethrow_at(at_key(p, "aex"), [&] { s.schedule.validate(); });
  }

  const auto& t = timing;
  if (t.calibration_sleeps.size() < 2) fail("protocol.calibration_sleeps", "needs at least two values");
  for (std::size_t i = 0; i < t.calibration_sleeps.size(); ++i) {
    if (t.calibration_sleeps[i] < Duration::zero())
      fail(at_index("protocol.calibration_sleeps", i), "must not be negative");
  }
  if (std::all_of(t.calibration_sleeps.begin(), t.calibration_sleeps.end(),
                  [&](Duration s) { return s == t.calibration_sleeps.front(); }))
    fail("protocol.calibration_sleeps", "needs at least two distinct values");
  if (t.calibration_pairs == 0) fail("protocol.calibration_pairs", "must be positive");
  if (t.peer_timeout <= Duration::zero()) fail("protocol.peer_timeout", "must be positive");
  if (t.ta_timeout <= Duration::zero()) fail("protocol.ta_timeout", "must be positive");

  rethrow_at("monitor", [&] { monitor.validate(); });
}

const LinkSpec& Scenario::link_between(EntityId a, EntityId b) const {
  for (const auto& o : link_overrides) {
    if ((o.a == a && o.b == b) || (o.a == b && o.b == a)) return o.link;
  }
  return links;
}

const attacks::AttackPolicy* Scenario::attack_on(EntityId node) const {
  for (const auto& a : attacks) {
    if (a.node == node && a.is_active()) return &a;
  }
  return nullptr;
}

Scenario scenario_from_json(const json& doc) {
  check_object(doc, "",
               {"schema_version", "name", "description", "seed", "horizon", "sample_interval", "nodes",
                "links", "link_overrides", "attacks", "switches", "protocol", "monitor"});
  const std::uint64_t version = read_unsigned(require(doc, "schema_version", ""), "schema_version");
  if (version != kScenarioSchemaVersion) {
    fail("schema_version", "unsupported version " + std::to_string(version) + " (expected " +
                               std::to_string(kScenarioSchemaVersion) + ")");
  }

  Scenario s;
  s.name = read_string(require(doc, "name", ""), "name");
  if (auto it = doc.find("description"); it != doc.end()) s.description = read_string(*it, "description");
  if (auto it = doc.find("seed"); it != doc.end()) s.seed = read_unsigned(*it, "seed");
  s.horizon = read_duration(require(doc, "horizon", ""), "horizon");
  if (auto it = doc.find("sample_interval"); it != doc.end()) s.sample_interval = read_duration(*it, "sample_interval");

  const json& nodes = require(doc, "nodes", "");
  if (!nodes.is_array()) fail("nodes", "expected an array");
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    const std::string p = at_index("nodes", i);
    check_object(nodes[i], p, {"aex", "tsc_hz", "tsc_offset", "calibration_bias_ppm"});
    NodeSpec n;
    if (auto it = nodes[i].find("aex"); it != nodes[i].end()) n.aex = read_aex(*it, at_key(p, "aex"));
    if (auto it = nodes[i].find("tsc_hz"); it != nodes[i].end()) n.tsc_hz = read_unsigned(*it, at_key(p, "tsc_hz"));
    if (auto it = nodes[i].find("tsc_offset"); it != nodes[i].end())
      n.tsc_offset = read_integer(*it, at_key(p, "tsc_offset"));
    if (auto it = nodes[i].find("calibration_bias_ppm"); it != nodes[i].end())
      n.calibration_bias_ppm = read_number(*it, at_key(p, "calibration_bias_ppm"));
    s.nodes.push_back(n);
  }

  if (auto it = doc.find("links"); it != doc.end()) s.links = read_link(*it, "links", s.links);
  if (auto it = doc.find("link_overrides"); it != doc.end()) {
    if (!it->is_array()) fail("link_overrides", "expected an array");
    for (std::size_t i = 0; i < it->size(); ++i) {
      const std::string p = at_index("link_overrides", i);
      const json& o = (*it)[i];
      check_object(o, p, {"a", "b", "link"});
      LinkOverride lo;
      lo.a = read_entity(require(o, "a", p), at_key(p, "a"));
      lo.b = read_entity(require(o, "b", p), at_key(p, "b"));
      lo.link = read_link(require(o, "link", p), at_key(p, "link"), s.links);
      s.link_overrides.push_back(lo);
    }
  }

  if (auto it = doc.find("attacks"); it != doc.end()) {
    if (!it->is_array()) fail("attacks", "expected an array");
    for (std::size_t i = 0; i < it->size(); ++i) s.attacks.push_back(read_attack((*it)[i], at_index("attacks", i)));
  }

  if (auto it = doc.find("switches"); it != doc.end()) {
    if (!it->is_array()) fail("switches", "expected an array");
    for (std::size_t i = 0; i < it->size(); ++i) {
      const std::string p = at_index("switches", i);
      const json& sw = (*it)[i];
      check_object(sw, p, {"at", "node", "aex"});
      RegimeSwitch r;
      r.at = read_duration(require(sw, "at", p), at_key(p, "at"));
      r.node = read_entity(require(sw, "node", p), at_key(p, "node"));
      r.schedule = read_aex(require(sw, "aex", p), at_key(p, "aex"));
      s.switches.push_back(r);
    }
  }

  if (auto it = doc.find("protocol"); it != doc.end()) {
    const std::string p = "protocol";
    check_object(*it, p, {"calibration_sleeps", "calibration_pairs", "sample_retries", "peer_timeout", "ta_timeout"});
    auto& t = s.timing;
    if (auto f = it->find("calibration_sleeps"); f != it->end()) {
      if (!f->is_array()) fail(at_key(p, "calibration_sleeps"), "expected an array");
      t.calibration_sleeps.clear();
      for (std::size_t i = 0; i < f->size(); ++i) {
        t.calibration_sleeps.push_back(read_duration((*f)[i], at_index(at_key(p, "calibration_sleeps"), i)));
      }
    }
    if (auto f = it->find("calibration_pairs"); f != it->end())
      t.calibration_pairs = static_cast<std::uint32_t>(read_unsigned(*f, at_key(p, "calibration_pairs")));
    if (auto f = it->find("sample_retries"); f != it->end())
      t.sample_retries = static_cast<std::uint32_t>(read_unsigned(*f, at_key(p, "sample_retries")));
    if (auto f = it->find("peer_timeout"); f != it->end()) t.peer_timeout = read_duration(*f, at_key(p, "peer_timeout"));
    if (auto f = it->find("ta_timeout"); f != it->end()) t.ta_timeout = read_duration(*f, at_key(p, "ta_timeout"));
  }

  if (auto it = doc.find("monitor"); it != doc.end()) {
    const std::string p = "monitor";
    check_object(*it, p,
                 {"core_frequency_hz", "window_ticks", "expected_count", "noise_std", "tolerance",
                  "outlier_probability", "outlier_std"});
    auto& m = s.monitor;
    if (auto f = it->find("core_frequency_hz"); f != it->end()) m.core_frequency_hz = read_number(*f, at_key(p, "core_frequency_hz"));
    if (auto f = it->find("window_ticks"); f != it->end()) m.window_ticks = read_integer(*f, at_key(p, "window_ticks"));
    if (auto f = it->find("expected_count"); f != it->end()) m.expected_count = read_number(*f, at_key(p, "expected_count"));
    if (auto f = it->find("noise_std"); f != it->end()) m.noise_std = read_number(*f, at_key(p, "noise_std"));
    if (auto f = it->find("tolerance"); f != it->end()) m.tolerance = read_number(*f, at_key(p, "tolerance"));
    if (auto f = it->find("outlier_probability"); f != it->end())
      m.outlier_probability = read_number(*f, at_key(p, "outlier_probability"));
    if (auto f = it->find("outlier_std"); f != it->end()) m.outlier_std = read_number(*f, at_key(p, "outlier_std"));
  }

  s.validate();
  return s;
}

json scenario_to_json(const Scenario& s) {
  json nodes = json::array();
  for (const auto& n : s.nodes) {
    nodes.push_back({{"aex", aex_to_json(n.aex)},
                     {"tsc_hz", n.tsc_hz},
                     {"tsc_offset", n.tsc_offset},
                     {"calibration_bias_ppm", n.calibration_bias_ppm}});
  }
  json overrides = json::array();
  for (const auto& o : s.link_overrides) overrides.push_back({{"a", o.a}, {"b", o.b}, {"link", link_to_json(o.link)}});
  json atk = json::array();
  for (const auto& a : s.attacks) atk.push_back(attack_to_json(a));
  json switches = json::array();
  for (const auto& r : s.switches) {
    switches.push_back({{"at", format_duration(r.at)}, {"node", r.node}, {"aex", aex_to_json(r.schedule)}});
  }
  json sleeps = json::array();
  for (auto d : s.timing.calibration_sleeps) sleeps.push_back(format_duration(d));

  return {{"schema_version", kScenarioSchemaVersion},
          {"name", s.name},
          {"description", s.description},
          {"seed", s.seed},
          {"horizon", format_duration(s.horizon)},
          {"sample_interval", format_duration(s.sample_interval)},
          {"nodes", nodes},
          {"links", link_to_json(s.links)},
          {"link_overrides", overrides},
          {"attacks", atk},
          {"switches", switches},
          {"protocol",
           {{"calibration_sleeps", sleeps},
            {"calibration_pairs", s.timing.calibration_pairs},
            {"sample_retries", s.timing.sample_retries},
            {"peer_timeout", format_duration(s.timing.peer_timeout)},
            {"ta_timeout", format_duration(s.timing.ta_timeout)}}},
          {"monitor",
           {{"core_frequency_hz", s.monitor.core_frequency_hz},
            {"window_ticks", s.monitor.window_ticks},
            {"expected_count", s.monitor.expected_count},
            {"noise_std", s.monitor.noise_std},
            {"tolerance", s.monitor.tolerance},
            {"outlier_probability", s.monitor.outlier_probability},
            {"outlier_std", s.monitor.outlier_std}}}};
}

Scenario load_scenario(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open scenario file '" + path + "'");
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ValidationError("", std::string("invalid JSON in '") + path + "': " + e.what());
  }
  return scenario_from_json(doc);
}

}  // namespace triad::experiments
