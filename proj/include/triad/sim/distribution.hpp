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

#include <string_view>
#include <variant>
#include <vector>

#include "triad/sim/rng.hpp"
#include "triad/sim/time.hpp"

namespace triad::sim {

struct ConstantDelay {
  Duration value{};
};

/// Uniform over the closed nanosecond range [lo, hi].
struct UniformDelay {
  Duration lo{};
  Duration hi{};
};

/// Finite set of atoms with (unnormalized) weights.
struct DiscreteDelay {
  std::vector<Duration> atoms;
  std::vector<double> weights;
};

using DurationDistribution = std::variant<ConstantDelay, UniformDelay, DiscreteDelay>;

/// Throws ConfigError for negative durations, empty or mismatched atom lists,
/// or weights that are negative or sum to zero.
void validate(const DurationDistribution& dist);

Duration sample_duration(const DurationDistribution& dist, RngStream& stream);

/// Looks the stream up by name; throws UnknownStream when absent.
Duration sample_duration(const DurationDistribution& dist, RngStreams& streams,
                         std::string_view stream_name);

/// Largest value the distribution can produce.
Duration max_value(const DurationDistribution& dist);

}  // namespace triad::sim
