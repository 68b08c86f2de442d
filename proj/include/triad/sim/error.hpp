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

#include <stdexcept>
#include <string>

namespace triad {

// Base for everything this library throws. Handlers that only care about
// "the simulator refused" can catch this.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ScheduleInPast : public Error {
 public:
  using Error::Error;
};

class UnknownStream : public Error {
 public:
  using Error::Error;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

class InsufficientData : public Error {
 public:
  using Error::Error;
};

class SingularRegression : public Error {
 public:
  using Error::Error;
};

class BackwardsTsc : public Error {
 public:
  using Error::Error;
};

class MalformedMessage : public Error {
 public:
  using Error::Error;
};

/// A drift segment spans an untaint or calibration event.
class SegmentationError : public Error {
 public:
  using Error::Error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

/// Scenario validation failure. `path` names the offending field, e.g.
/// `nodes[2].aex.regime`.
class ValidationError : public Error {
 public:
  ValidationError(std::string path, const std::string& what)
      : Error(path + ": " + what), path_(std::move(path)) {}

  const std::string& path() const { return path_; }

 private:
  std::string path_;
};

}  // namespace triad
