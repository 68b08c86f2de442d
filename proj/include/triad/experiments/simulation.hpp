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

#include "triad/experiments/scenario.hpp"
#include "triad/experiments/trace.hpp"

namespace triad::experiments {

struct RunOptions {
  /// Store every ScenarioRecord. Counters, transitions and jumps are always
  /// kept; long batch runs turn records off to save memory.
  bool keep_records = true;
};

/// Runs the scenario deterministically to its horizon. The scenario must
/// validate (ValidationError otherwise).
Trace simulate(const Scenario& scenario, const RunOptions& options = {});

}  // namespace triad::experiments
