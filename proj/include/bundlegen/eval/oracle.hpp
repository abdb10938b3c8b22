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
#include <functional>
#include <span>
#include <vector>

#include "bundlegen/generate/beam_search.hpp"

namespace bundlegen::eval {

using generate::Candidate;
using generate::CandidateSet;
using generate::InferenceModel;

inline constexpr std::size_t kOracleMaxItems = 8;
inline constexpr std::size_t kOracleMaxSize = 3;

// Scores every duplicate-free item sequence of length 1..T with the masked
// sequence log-probability and keeps the best ordering of each set. Only
// feasible for tiny vocabularies.
inline CandidateSet exhaustive_candidates(const InferenceModel& im,
                                          std::span<const ItemId> context,
                                          std::size_t max_size, int shift = 0) {
  const std::size_t n = im.n_items();
  if (n > kOracleMaxItems || max_size > kOracleMaxSize || max_size < 1) {
    throw Error(ErrorKind::kInvalidArgument,
                "exhaustive oracle needs N <= 8 and 1 <= T <= 3");
  }
  std::vector<Candidate> raw;
  std::vector<ItemId> seq;
  std::vector<bool> used(n, false);
  std::function<void()> walk = [&] {
    if (!seq.empty()) raw.push_back({seq, generate::sequence_log_prob(im, context, seq, shift)});
    if (seq.size() == max_size) return;
    for (std::size_t j = 0; j < n; ++j) {
      if (used[j]) continue;
      used[j] = true;
      seq.push_back(static_cast<ItemId>(j));
      walk();
      seq.pop_back();
      used[j] = false;
    }
  };
  walk();
  return CandidateSet::from(std::move(raw));
}

// The k best bundles by exhaustive enumeration.
inline BundleList exhaustive_topk_oracle(const InferenceModel& im,
                                         std::span<const ItemId> context, std::size_t max_size,
                                         std::size_t k, int shift = 0) {
  const CandidateSet all = exhaustive_candidates(im, context, max_size, shift);
  BundleList out;
  for (std::size_t i = 0; i < std::min(k, all.size()); ++i) {
    out.bundles.emplace_back(all[i].items);
    out.scores.push_back(all[i].log_prob);
  }
  return out;
}

}  // namespace bundlegen::eval
