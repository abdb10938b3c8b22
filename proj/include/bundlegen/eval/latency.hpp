// Copyright 2026 The Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <algorithm>
#include <chrono>
#include <cmath>
#include <functional>
#include <vector>

#include "bundlegen/error.hpp"

namespace bundlegen::eval {

struct LatencyStats {
  double mean_ms = 0.0;
  double p95_ms = 0.0;
  std::size_t calls = 0;
};

// Mean and nearest-rank p95 of per-call timings in milliseconds.
inline LatencyStats latency_stats(std::vector<double> ms) {
  if (ms.empty()) throw Error(ErrorKind::kInvalidArgument, "no users to time");
  LatencyStats s;
  s.calls = ms.size();
  for (double v : ms) s.mean_ms += v;
  s.mean_ms /= static_cast<double>(ms.size());
  std::sort(ms.begin(), ms.end());
  const auto rank = static_cast<std::size_t>(std::ceil(0.95 * static_cast<double>(ms.size())));
  s.p95_ms = ms[std::max<std::size_t>(rank, 1) - 1];
  return s;
}

// Times call(i) for each of n users on the calling thread after `warmup`
// untimed calls.
inline LatencyStats measure_latency(const std::function<void(std::size_t)>& call,
                                    std::size_t n, std::size_t warmup = 1) {
  if (n == 0) throw Error(ErrorKind::kInvalidArgument, "no users to time");
  for (std::size_t i = 0; i < std::min(warmup, n); ++i) call(i);
  std::vector<double> ms(n);
  for (std::size_t i = 0; i < n; ++i) {
    const auto start = std::chrono::steady_clock::now();
    call(i);
    ms[i] = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start)
                .count();
  }
  return latency_stats(std::move(ms));
}

}  // namespace bundlegen::eval
