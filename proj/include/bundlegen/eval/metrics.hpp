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
#include <map>
#include <random>
#include <span>
#include <vector>

#include "bundlegen/core/types.hpp"
#include "bundlegen/error.hpp"

namespace bundlegen::eval {

// Recommended bundles for one user, first position first.
struct UserList {
  RawId user = 0;
  std::vector<RawItemSet> bundles;
};

// Target bundles per user; several for multi-bundle protocols.
using GroundTruth = std::map<RawId, std::vector<RawItemSet>>;

struct PrecisionResult {
  double value = 0.0;
  std::size_t users = 0;
  std::size_t skipped = 0;  // users absent from the ground truth
};

// Mean over users and the first k positions of |b ∩ gt| / |b ∪ gt|. With
// several ground-truth bundles each position takes its best match.
inline PrecisionResult precision_at_k_detailed(std::span<const UserList> lists,
                                               const GroundTruth& gt, std::size_t k) {
  if (k == 0) throw Error(ErrorKind::kInvalidArgument, "k must be >= 1");
  PrecisionResult r;
  double total = 0.0;
  for (const UserList& ul : lists) {
    auto it = gt.find(ul.user);
    if (it == gt.end() || it->second.empty()) {
      ++r.skipped;
      continue;
    }
    if (ul.bundles.size() < k) {
      throw Error(ErrorKind::kShortList, "list of user " + std::to_string(ul.user) +
                                             " has fewer than " + std::to_string(k) + " bundles");
    }
    double user_sum = 0.0;
    for (std::size_t pos = 0; pos < k; ++pos) {
      double best = 0.0;
      for (const RawItemSet& g : it->second) best = std::max(best, jaccard(ul.bundles[pos], g));
      user_sum += best;
    }
    total += user_sum / static_cast<double>(k);
    ++r.users;
  }
  if (r.users > 0) r.value = total / static_cast<double>(r.users);
  return r;
}

inline double precision_at_k(std::span<const UserList> lists, const GroundTruth& gt,
                             std::size_t k) {
  return precision_at_k_detailed(lists, gt, k).value;
}

// Mean over ordered pairs a != b of 1 - Jaccard(a, b).
inline double list_diversity(std::span<const RawItemSet> list) {
  const std::size_t k = list.size();
  if (k < 2) throw Error(ErrorKind::kDegenerateList, "diversity needs at least 2 bundles");
  double s = 0.0;
  for (std::size_t a = 0; a < k; ++a) {
    for (std::size_t b = 0; b < k; ++b) {
      if (a != b) s += 1.0 - jaccard(list[a], list[b]);
    }
  }
  return s / static_cast<double>(k * (k - 1));
}

inline double diversity(std::span<const UserList> lists) {
  if (lists.empty()) throw Error(ErrorKind::kInvalidArgument, "no lists");
  double s = 0.0;
  for (const UserList& ul : lists) s += list_diversity(ul.bundles);
  return s / static_cast<double>(lists.size());
}

// One scored positive for AUC.
struct AucCase {
  RawId user = 0;
  std::vector<RawId> context;
  RawItemSet positive;
};

using BundleScorer = std::function<double(const AucCase&, const RawItemSet&)>;

// Fraction of (positive, uniform negative) pairs ordered correctly; ties 0.5.
// Negatives come from `pool` excluding the positive itself.
inline double auc(std::span<const AucCase> cases, std::span<const RawItemSet> pool,
                  const BundleScorer& score, std::uint64_t seed) {
  if (pool.empty()) throw Error(ErrorKind::kInvalidArgument, "empty negative pool");
  if (cases.empty()) throw Error(ErrorKind::kInvalidArgument, "no positives");
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<std::size_t> pick(0, pool.size() - 1);
  const bool varied =
      std::any_of(pool.begin(), pool.end(), [&](const RawItemSet& b) { return b != pool[0]; });
  double wins = 0.0;
  for (const AucCase& c : cases) {
    if (!varied && c.positive == pool[0]) {
      throw Error(ErrorKind::kInvalidArgument, "negative pool holds only the positive");
    }
    const RawItemSet* neg = nullptr;
    do {
      neg = &pool[pick(rng)];
    } while (*neg == c.positive);
    const double sp = score(c, c.positive);
    const double sn = score(c, *neg);
    wins += sp > sn ? 1.0 : (sp == sn ? 0.5 : 0.0);
  }
  return wins / static_cast<double>(cases.size());
}

}  // namespace bundlegen::eval
