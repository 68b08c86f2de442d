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

#include "triad/experiments/builtins.hpp"

#include <filesystem>

#include "triad/sim/error.hpp"

namespace triad::experiments {

std::vector<std::string> builtin_names() {
  std::vector<std::string> names;
  for (const auto& b : detail::builtin_sources()) names.emplace_back(b.name);
  return names;
}

bool is_builtin(std::string_view name) {
  for (const auto& b : detail::builtin_sources()) {
    if (b.name == name) return true;
  }
  return false;
}

std::string_view builtin_source(std::string_view name) {
  for (const auto& b : detail::builtin_sources()) {
    if (b.name == name) return b.json;
  }
  throw ConfigError("unknown builtin scenario '" + std::string(name) + "'");
}

Scenario builtin_scenario(std::string_view name) {
  return scenario_from_json(nlohmann::json::parse(builtin_source(name)));
}

Scenario resolve_scenario(const std::string& file_or_builtin) {
  if (is_builtin(file_or_builtin) && !std::filesystem::exists(file_or_builtin)) {
    return builtin_scenario(file_or_builtin);
  }
  return load_scenario(file_or_builtin);
}

}  // namespace triad::experiments
