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

#include "triad/sim/rng.hpp"

#include <cmath>
#include <numbers>

#include "triad/sim/error.hpp"

namespace triad::sim {

RngStream::RngStream(std::uint64_t master_seed, std::string_view name)
    : engine_(mix64(mix64(master_seed) ^ fnv1a(name))) {}

std::uint64_t RngStream::below(std::uint64_t bound) {
  if (bound == 0) return 0;
  ++draws_;
  unsigned __int128 m = static_cast<unsigned __int128>(engine_()) * bound;
  auto low = static_cast<std::uint64_t>(m);
  if (low < bound) {
    const std::uint64_t threshold = (0 - bound) % bound;
    while (low < threshold) {
      m = static_cast<unsigned __int128>(engine_()) * bound;
      low = static_cast<std::uint64_t>(m);
    }
  }
  return static_cast<std::uint64_t>(m >> 64);
}

std::int64_t RngStream::between(std::int64_t lo, std::int64_t hi) {
  if (hi <= lo) return lo;
  const auto span = static_cast<std::uint64_t>(hi - lo);
  if (span == UINT64_MAX) return static_cast<std::int64_t>(next_u64());
  return lo + static_cast<std::int64_t>(below(span + 1));
}

double RngStream::standard_normal() {
  ++draws_;
  // 1 - u keeps the log argument in (0, 1].
  const double u1 = 1.0 - uniform01();
  const double u2 = uniform01();
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

RngStream& RngStreams::create(const std::string& name) {
  auto [it, inserted] = streams_.try_emplace(name, master_seed_, name);
  return it->second;
}

RngStream& RngStreams::get(std::string_view name) {
  auto it = streams_.find(name);
  if (it == streams_.end()) {
    throw UnknownStream("unknown rng stream '" + std::string(name) + "'");
  }
  return it->second;
}

}  // namespace triad::sim
