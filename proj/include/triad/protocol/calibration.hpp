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

#include <span>

#include "triad/sim/time.hpp"

namespace triad::protocol {

/// One roundtrip with the Time Authority: the TA was asked to sleep
/// `requested_sleep` and the monitoring thread measured `tsc_delta` ticks
/// between send and receive.
struct CalibrationSample {
  Duration requested_sleep{};
  Ticks tsc_delta = 0;
  /// False when an AEX interrupted the roundtrip.
  bool valid = true;
};

struct RegressionFit {
  double slope_hz = 0.0;          // ticks per reference second
  double intercept_ticks = 0.0;   // network roundtrip, in ticks
  std::size_t samples_used = 0;
};

/// Least-squares fit of tsc_delta against requested sleep over the valid
/// samples. Throws InsufficientData (< 2 valid samples) or SingularRegression
/// (every valid sample shares one sleep value).
RegressionFit fit_calibration(std::span<const CalibrationSample> samples);

/// The calibrated TSC rate F_calib: the slope of fit_calibration. The
/// intercept only absorbs the (unknown) network delay.
double calibrate_speed(std::span<const CalibrationSample> samples);

}  // namespace triad::protocol
