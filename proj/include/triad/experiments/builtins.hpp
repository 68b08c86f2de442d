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

#include <string>
#include <string_view>
#include <vector>

#include "triad/experiments/scenario.hpp"

namespace triad::experiments {

namespace detail {

struct BuiltinSource {
  std::string_view name;
  std::string_view json;
};

/// Sorted by name; embedded from scenarios/*.json.
const std::vector<BuiltinSource>& builtin_sources();

}  // namespace detail

std::vector<std::string> builtin_names();
bool is_builtin(std::string_view name);
/// Throws ConfigError for an unknown name.
Scenario builtin_scenario(std::string_view name);
std::string_view builtin_source(std::string_view name);

/// A builtin name, or else a path to a scenario file.
Scenario resolve_scenario(const std::string& file_or_builtin);

}  // namespace triad::experiments
