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

#include "triad/sim/engine.hpp"

namespace triad::sim {

namespace {

void put_u64(std::string& out, std::uint64_t v) {
  for (int i = 0; i < 8; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
}

}  // namespace

const char* to_string(EventKind kind) {
  switch (kind) {
    case EventKind::Aex: return "aex";
    case EventKind::MessageDelivery: return "message";
    case EventKind::Timer: return "timer";
    case EventKind::SampleWindowEnd: return "sample";
    case EventKind::Control: return "control";
  }
  return "?";
}

void fold_digest(std::uint64_t& digest, const DispatchRecord& record) {
  auto fold = [&](std::uint64_t v) {
    for (int i = 0; i < 8; ++i) {
      digest ^= (v >> (8 * i)) & 0xff;
      digest *= 0x100000001b3ULL;
    }
  };
  fold(record.due.ns);
  fold(record.sequence);
  fold(record.target);
  fold(static_cast<std::uint64_t>(record.kind));
}

std::string DispatchTrace::serialize() const {
  std::string out;
  out.reserve(32 + log.size() * 19);
  put_u64(out, dispatched);
  put_u64(out, final_time.ns);
  put_u64(out, digest);
  put_u64(out, log.size());
  for (const auto& r : log) {
    put_u64(out, r.due.ns);
    put_u64(out, r.sequence);
    out.push_back(static_cast<char>(r.target & 0xff));
    out.push_back(static_cast<char>(r.target >> 8));
    out.push_back(static_cast<char>(r.kind));
  }
  return out;
}

}  // namespace triad::sim
