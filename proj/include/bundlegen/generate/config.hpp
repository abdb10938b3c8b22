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

#include <cmath>
#include <limits>
#include <span>
#include <vector>

#include "bundlegen/core/types.hpp"
#include "bundlegen/error.hpp"
#include "json.hpp"

namespace bundlegen::generate {

struct GenerationConfig {
  std::size_t beam_width = 50;     // M
  std::size_t list_size = 10;      // K
  std::size_t max_bundle_size = 8; // T
  double lambda = 0.0;
  int shift = 0;                   // C
  double jitter = 1e-9;

  void validate() const {
    if (list_size < 1 || beam_width < list_size) {
      throw Error(ErrorKind::kInvalidArgument, "need beam_width >= list_size >= 1");
    }
    if (max_bundle_size < 1) {
      throw Error(ErrorKind::kInvalidArgument, "max_bundle_size must be >= 1");
    }
    if (!(lambda >= 0.0) || !std::isfinite(lambda)) {
      throw Error(ErrorKind::kInvalidArgument, "lambda must be finite and >= 0");
    }
    if (shift < 0) throw Error(ErrorKind::kInvalidArgument, "shift C must be >= 0");
    if (!(jitter > 0.0)) throw Error(ErrorKind::kInvalidArgument, "jitter must be > 0");
  }
};

inline nlohmann::json to_json(const GenerationConfig& c) {
  return {{"beam_width", c.beam_width}, {"list_size", c.list_size},
          {"max_bundle_size", c.max_bundle_size}, {"lambda", c.lambda},
          {"shift", c.shift}, {"jitter", c.jitter}};
}

inline GenerationConfig generation_config_from_json(const nlohmann::json& j,
                                                    GenerationConfig c = {}) {
  c.beam_width = j.value("beam_width", c.beam_width);
  c.list_size = j.value("list_size", c.list_size);
  c.max_bundle_size = j.value("max_bundle_size", c.max_bundle_size);
  c.lambda = j.value("lambda", c.lambda);
  c.shift = j.value("shift", c.shift);
  c.jitter = j.value("jitter", c.jitter);
  return c;
}

// Mask over the full candidate list (items, then END) at decoding step t:
// END gets max(C - t, 0), items already in the prefix get +inf.
inline std::vector<double> mask_vector(std::size_t t, std::span<const ItemId> prefix,
                                       std::size_t n_items, int shift) {
  if (t < 1) throw Error(ErrorKind::kInvalidArgument, "mask step starts at 1");
  std::vector<double> m(n_items + 1, 0.0);
  for (ItemId id : prefix) {
    if (id < 0 || static_cast<std::size_t>(id) >= n_items) {
      throw Error(ErrorKind::kUnknownItem, "prefix item " + std::to_string(id));
    }
    m[static_cast<std::size_t>(id)] = std::numeric_limits<double>::infinity();
  }
  m[n_items] = std::max(static_cast<double>(shift) - static_cast<double>(t), 0.0);
  return m;
}

}  // namespace bundlegen::generate
