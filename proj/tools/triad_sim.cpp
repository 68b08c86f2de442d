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

// Command-line front end: run scenarios, list builtins, validate scenario
// files and summarize exported traces.

#include <CLI11.hpp>

#include <chrono>
#include <cstdlib>
#include <iostream>
#include <optional>
#include <string>

#include "triad/experiments/builtins.hpp"
#include "triad/experiments/export.hpp"
#include "triad/experiments/simulation.hpp"
#include "triad/sim/error.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitFailure = 1;
constexpr int kExitValidation = 2;

using namespace triad;
using namespace triad::experiments;

int cmd_run(const std::string& target, std::optional<std::uint64_t> seed, std::optional<std::string> horizon,
            const std::string& out) {
  Scenario scenario = resolve_scenario(target);
  if (seed) scenario.seed = *seed;
  if (horizon) {
    try {
      scenario.horizon = parse_duration(*horizon);
    } catch (const ConfigError& e) {
      throw ValidationError("--horizon", e.what());
    }
    scenario.switches.erase(std::remove_if(scenario.switches.begin(), scenario.switches.end(),
                                           [&](const RegimeSwitch& s) { return s.at >= scenario.horizon; }),
                            scenario.switches.end());
  }
  scenario.validate();

  const auto started = std::chrono::steady_clock::now();
  const Trace trace = simulate(scenario);
  const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
  export_trace(trace, out);

  const MetricsSummary summary = summarize(trace);
  std::cout << "scenario " << scenario.name << " seed " << scenario.seed << " horizon "
            << format_duration(scenario.horizon) << " (" << trace.events_dispatched << " events, " << wall
            << " s)\n";
  for (const auto& n : summary.nodes) {
    std::cout << "  node " << n.node << ": availability " << n.availability << ", aex " << n.aex << ", ta refs "
              << n.ta_references << ", peer untaints " << n.peer_untaints;
    if (n.f_calib_hz) std::cout << ", F_calib " << *n.f_calib_hz / 1e6 << " MHz";
    if (n.median_drift_rate_ppm) std::cout << ", drift rate " << *n.median_drift_rate_ppm << " ppm";
    std::cout << "\n";
  }
  std::cout << "trace written to " << out << "\n";
  return kExitOk;
}

int cmd_list() {
  for (const auto& name : builtin_names()) {
    const Scenario s = builtin_scenario(name);
    std::cout << name << "\t" << format_duration(s.horizon) << "\t" << s.description << "\n";
  }
  return kExitOk;
}

int cmd_validate(const std::string& file) {
  const Scenario s = load_scenario(file);
  std::cout << "ok: " << s.name << " (" << s.node_count() << " nodes, horizon " << format_duration(s.horizon)
            << ")\n";
  return kExitOk;
}

int cmd_summarize(const std::string& dir) {
  std::cout << summary_to_json(summarize_directory(dir)).dump(2) << "\n";
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Discrete-event simulator for the Triad trusted-time protocol"};
  app.require_subcommand(1);

  std::string run_target;
  std::optional<std::uint64_t> run_seed;
  std::optional<std::string> run_horizon;
  std::string run_out = "trace";
  auto* run = app.add_subcommand("run", "Run a scenario file or builtin and export its trace");
  run->add_option("scenario", run_target, "Scenario file or builtin name")->required();
  run->add_option("--seed", run_seed, "Override the scenario seed");
  run->add_option("--horizon", run_horizon, "Override the horizon, e.g. 10min");
  run->add_option("--out", run_out, "Output directory")->capture_default_str();

  auto* list = app.add_subcommand("list-builtins", "List builtin scenarios");

  std::string validate_file;
  auto* validate = app.add_subcommand("validate", "Validate a scenario file");
  validate->add_option("file", validate_file, "Scenario file")->required();

  std::string summarize_dir;
  auto* summarize = app.add_subcommand("summarize", "Recompute metrics from an exported trace directory");
  summarize->add_option("dir", summarize_dir, "Trace directory")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  }

  try {
    if (*run) return cmd_run(run_target, run_seed, run_horizon, run_out);
    if (*list) return cmd_list();
    if (*validate) return cmd_validate(validate_file);
    if (*summarize) return cmd_summarize(summarize_dir);
  } catch (const ValidationError& e) {
    std::cerr << "validation error: " << e.what() << "\n";
    return kExitValidation;
  } catch (const ConfigError& e) {
    std::cerr << "configuration error: " << e.what() << "\n";
    return kExitValidation;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitFailure;
  }
  return kExitFailure;
}
