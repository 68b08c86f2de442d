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

// Times the OpenMP batch kernels against their serial references and checks
// that both produce the same results.

#include <omp.h>

#include <chrono>
#include <cstdio>
#include <numeric>

#include "triad/experiments/batch.hpp"
#include "triad/experiments/builtins.hpp"

using namespace triad;
using namespace triad::experiments;

namespace {

template <typename F>
double seconds(F&& f) {
  const auto t0 = std::chrono::steady_clock::now();
  f();
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

}  // namespace

int main(int argc, char** argv) {
  const int seeds_n = argc > 1 ? std::atoi(argv[1]) : 16;
  const std::uint64_t windows = argc > 2 ? std::strtoull(argv[2], nullptr, 10) : 1'000'000;
  std::printf("threads: %d\n", omp_get_max_threads());

  std::vector<std::uint64_t> seeds(static_cast<std::size_t>(seeds_n));
  std::iota(seeds.begin(), seeds.end(), 1);
  const Scenario s = builtin_scenario("fault_free_triad_like");
  std::vector<RunDigest> a, b;
  const double ts = seconds([&] { a = run_seeds_serial(s, seeds); });
  const double tp = seconds([&] { b = run_seeds_parallel(s, seeds); });
  std::printf("seed runs (%d x %s): serial %.3f s, parallel %.3f s, speedup %.2f, identical %s\n", seeds_n,
              s.name.c_str(), ts, tp, ts / tp, a == b ? "yes" : "NO");

  const clock::MonitorCounter counter;
  const clock::TscTimeline tsc;
  MonitorBatchResult ms, mp;
  const double ms_t = seconds([&] { ms = monitor_batch_serial(counter, tsc, windows, 1); });
  const double mp_t = seconds([&] { mp = monitor_batch_parallel(counter, tsc, windows, 1); });
  std::printf("monitor windows (%llu): serial %.3f s, parallel %.3f s, speedup %.2f, identical %s\n",
              static_cast<unsigned long long>(windows), ms_t, mp_t, ms_t / mp_t, ms == mp ? "yes" : "NO");
  return a == b && ms == mp ? 0 : 1;
}
