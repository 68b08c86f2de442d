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

#include "triad/sim/distribution.hpp"

#include <algorithm>
#include <numeric>

#include "triad/sim/error.hpp"

namespace triad::sim {

namespace {

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

}  // namespace

void validate(const DurationDistribution& dist) {
  std::visit(Overloaded{
                 [](const ConstantDelay& c) {
                   if (c.value < Duration::zero()) throw ConfigError("constant delay is negative");
                 },
                 [](const UniformDelay& u) {
                   if (u.lo < Duration::zero()) throw ConfigError("uniform lower bound is negative");
                   if (u.hi < u.lo) throw ConfigError("uniform upper bound below lower bound");
                 },
                 [](const DiscreteDelay& d) {
                   if (d.atoms.empty()) throw ConfigError("discrete distribution has no atoms");
                   if (d.atoms.size() != d.weights.size())
                     throw ConfigError("discrete distribution atoms and weights differ in length");
                   double total = 0.0;
                   for (std::size_t i = 0; i < d.atoms.size(); ++i) {
                     if (d.atoms[i] < Duration::zero()) throw ConfigError("discrete atom is negative");
                     if (!(d.weights[i] >= 0.0)) throw ConfigError("discrete weight is negative");
                     total += d.weights[i];
                   }
                   if (!(total > 0.0)) throw ConfigError("discrete weights sum to zero");
                 },
             },
             dist);
}

Duration sample_duration(const DurationDistribution& dist, RngStream& stream) {
  return std::visit(Overloaded{
                        [](const ConstantDelay& c) { return c.value; },
                        [&](const UniformDelay& u) {
                          return Duration{stream.between(u.lo.count(), u.hi.count())};
                        },
                        [&](const DiscreteDelay& d) {
                          const double total = std::accumulate(d.weights.begin(), d.weights.end(), 0.0);
                          const double pick = stream.uniform01() * total;
                          double acc = 0.0;
                          for (std::size_t i = 0; i + 1 < d.atoms.size(); ++i) {
                            acc += d.weights[i];
                            if (pick < acc) return d.atoms[i];
                          }
                          return d.atoms.back();
                        },
                    },
                    dist);
}

Duration sample_duration(const DurationDistribution& dist, RngStreams& streams,
                         std::string_view stream_name) {
  return sample_duration(dist, streams.get(stream_name));
}

Duration max_value(const DurationDistribution& dist) {
  return std::visit(Overloaded{
                        [](const ConstantDelay& c) { return c.value; },
                        [](const UniformDelay& u) { return u.hi; },
                        [](const DiscreteDelay& d) {
                          return d.atoms.empty() ? Duration::zero()
                                                 : *std::max_element(d.atoms.begin(), d.atoms.end());
                        },
                    },
                    dist);
}

}  // namespace triad::sim
