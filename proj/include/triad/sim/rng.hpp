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
#include <map>
#include <random>
#include <string>
#include <string_view>

namespace triad::sim {

/// splitmix64 finalizer; used to derive independent stream seeds.
constexpr std::uint64_t mix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

constexpr std::uint64_t fnv1a(std::string_view s) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (char c : s) {
    h ^= static_cast<unsigned char>(c);
    h *= 0x100000001b3ULL;
  }
  return h;
}

/// One named random stream. The engine is std::mt19937_64, whose output
/// sequence is fixed by the standard; the transforms below are written out so
/// that draws are identical across standard library implementations.
class RngStream {
 public:
  RngStream(std::uint64_t master_seed, std::string_view name);
  explicit RngStream(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next_u64() { return engine_(); }

  /// Uniform in [0, 1) with 53 bits of resolution.
  double uniform01() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  /// Uniform integer in [0, bound). Lemire's nearly-divisionless rejection.
  std::uint64_t below(std::uint64_t bound);

  /// Uniform integer in [lo, hi].
  std::int64_t between(std::int64_t lo, std::int64_t hi);

  bool bernoulli(double p) { return p >= 1.0 || (p > 0.0 && uniform01() < p); }

  /// Standard normal via Box-Muller (one value per call, the sine branch is
  /// discarded so each call consumes exactly two 64-bit draws).
  double standard_normal();

  double normal(double mean, double stddev) { return mean + stddev * standard_normal(); }

  std::uint64_t draws() const { return draws_; }

 private:
  std::mt19937_64 engine_;
  std::uint64_t draws_ = 0;
};

/// Registry of named streams derived from one master seed. A stream's sequence
/// depends only on (master seed, name), so adding an entity never perturbs the
/// streams of existing ones.
class RngStreams {
 public:
  explicit RngStreams(std::uint64_t master_seed) : master_seed_(master_seed) {}

  RngStream& create(const std::string& name);
  /// Throws UnknownStream when `name` was never created.
  RngStream& get(std::string_view name);
  bool contains(std::string_view name) const { return streams_.find(name) != streams_.end(); }

  std::uint64_t master_seed() const { return master_seed_; }

 private:
  std::uint64_t master_seed_;
  std::map<std::string, RngStream, std::less<>> streams_;
};

}  // namespace triad::sim
