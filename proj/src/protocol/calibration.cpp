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

#include "triad/protocol/calibration.hpp"

#include "triad/sim/error.hpp"

namespace triad::protocol {

RegressionFit fit_calibration(std::span<const CalibrationSample> samples) {
  std::size_t n = 0;
  long double sum_x = 0.0L;
  long double sum_y = 0.0L;
  bool distinct = false;
  std::int64_t first_x = 0;
  for (const auto& s : samples) {
    if (!s.valid) continue;
    if (n == 0) first_x = s.requested_sleep.count();
    distinct = distinct || s.requested_sleep.count() != first_x;
    sum_x += static_cast<long double>(s.requested_sleep.count());
    sum_y += static_cast<long double>(s.tsc_delta);
    ++n;
  }
  if (n < 2) throw InsufficientData("calibration needs at least 2 valid samples");
  if (!distinct) throw SingularRegression("all valid calibration samples share one sleep value");

  const long double mean_x = sum_x / static_cast<long double>(n);
  const long double mean_y = sum_y / static_cast<long double>(n);
  long double sxx = 0.0L;
  long double sxy = 0.0L;
  for (const auto& s : samples) {
    if (!s.valid) continue;
    const long double dx = static_cast<long double>(s.requested_sleep.count()) - mean_x;
    sxx += dx * dx;
    sxy += dx * (static_cast<long double>(s.tsc_delta) - mean_y);
  }
  const long double slope_per_ns = sxy / sxx;
  RegressionFit fit;
  fit.slope_hz = static_cast<double>(slope_per_ns * 1e9L);
  fit.intercept_ticks = static_cast<double>(mean_y - slope_per_ns * mean_x);
  fit.samples_used = n;
  return fit;
}

double calibrate_speed(std::span<const CalibrationSample> samples) {
  return fit_calibration(samples).slope_hz;
}

}  // namespace triad::protocol
