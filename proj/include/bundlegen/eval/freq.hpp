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
#include <cmath>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "bundlegen/core/types.hpp"

namespace bundlegen::eval {

struct FrequentItemset {
  RawItemSet items;
  std::size_t support = 0;
};

// Level-wise Apriori: every itemset contained in at least `min_support`
// orders, grouped by size (index 0 holds singletons).
inline std::vector<std::vector<FrequentItemset>> apriori(std::span<const RawItemSet> orders,
                                                         std::size_t min_support) {
  min_support = std::max<std::size_t>(min_support, 1);
  std::vector<std::vector<FrequentItemset>> levels;
  std::map<std::vector<RawId>, std::size_t> counts;
  std::vector<RawId> items;  // frequent singletons, sorted
  for (const RawItemSet& o : orders) {
    for (RawId id : o) ++counts[{id}];
  }
  for (std::size_t size = 1;; ++size) {
    std::vector<FrequentItemset> level;
    for (const auto& [ids, n] : counts) {
      if (n >= min_support) level.push_back({RawItemSet(ids), n});
    }
    if (level.empty()) break;
    if (size == 1) {
      for (const auto& f : level) items.push_back(f.items.ids()[0]);
    }
    levels.push_back(level);

    // Join itemsets sharing their first size-1 items, then prune candidates
    // with an infrequent subset.
    std::map<std::vector<RawId>, std::size_t> next;
    std::map<std::vector<RawId>, bool> frequent;
    for (const auto& f : level) frequent[f.items.ids()] = true;
    for (std::size_t a = 0; a < level.size(); ++a) {
      const auto& x = level[a].items.ids();
      for (std::size_t b = a + 1; b < level.size(); ++b) {
        const auto& y = level[b].items.ids();
        if (!std::equal(x.begin(), x.end() - 1, y.begin())) break;
        std::vector<RawId> cand = x;
        cand.push_back(y.back());
        bool ok = true;
        for (std::size_t drop = 0; ok && drop < cand.size(); ++drop) {
          std::vector<RawId> sub;
          for (std::size_t i = 0; i < cand.size(); ++i) {
            if (i != drop) sub.push_back(cand[i]);
          }
          ok = frequent.count(sub) > 0;
        }
        if (ok) next.emplace(std::move(cand), 0);
      }
    }
    if (next.empty()) break;
    const std::size_t want = size + 1;
    std::vector<RawId> kept;
    std::vector<std::size_t> pick;
    for (const RawItemSet& o : orders) {
      kept.clear();
      for (RawId id : o) {
        if (std::binary_search(items.begin(), items.end(), id)) kept.push_back(id);
      }
      if (kept.size() < want) continue;
      // Enumerate want-subsets of the order and count those that are candidates.
      pick.assign(want, 0);
      for (std::size_t i = 0; i < want; ++i) pick[i] = i;
      std::vector<RawId> sub(want);
      while (true) {
        for (std::size_t i = 0; i < want; ++i) sub[i] = kept[pick[i]];
        if (auto it = next.find(sub); it != next.end()) ++it->second;
        std::size_t i = want;
        while (i > 0 && pick[i - 1] == kept.size() - want + i - 1) --i;
        if (i == 0) break;
        ++pick[i - 1];
        for (std::size_t j = i; j < want; ++j) pick[j] = pick[j - 1] + 1;
      }
    }
    counts = std::move(next);
  }
  return levels;
}

struct FreqOptions {
  std::size_t min_count = 2;
  double min_fraction = 0.001;
};

struct FreqResult {
  std::vector<FrequentItemset> itemsets;  // best first
  std::size_t min_support = 0;            // threshold finally used
  bool lowered = false;
  std::string warning;
};

namespace detail {

// Closed itemsets of size >= 2: no immediate superset has equal support.
inline std::vector<FrequentItemset> closed_itemsets(
    const std::vector<std::vector<FrequentItemset>>& levels) {
  std::vector<FrequentItemset> out;
  for (std::size_t l = 1; l < levels.size(); ++l) {
    for (const FrequentItemset& f : levels[l]) {
      bool closed = true;
      if (l + 1 < levels.size()) {
        for (const FrequentItemset& g : levels[l + 1]) {
          if (g.support == f.support && intersection_size(f.items, g.items) == f.items.size()) {
            closed = false;
            break;
          }
        }
      }
      if (closed) out.push_back(f);
    }
  }
  std::sort(out.begin(), out.end(), [](const FrequentItemset& a, const FrequentItemset& b) {
    if (a.support != b.support) return a.support > b.support;
    if (a.items.size() != b.items.size()) return a.items.size() > b.items.size();
    return a.items < b.items;
  });
  return out;
}

}  // namespace detail

// Non-personalized baseline: the k best-supported closed frequent itemsets
// with at least two items. The support threshold starts at
// max(min_count, min_fraction * orders) and halves until k itemsets exist.
inline FreqResult freq_baseline(std::span<const RawItemSet> orders, std::size_t k,
                                const FreqOptions& opts = {}) {
  FreqResult r;
  std::size_t s = std::max<std::size_t>(
      opts.min_count,
      static_cast<std::size_t>(std::ceil(opts.min_fraction * static_cast<double>(orders.size()))));
  while (true) {
    r.itemsets = detail::closed_itemsets(apriori(orders, s));
    r.min_support = s;
    if (r.itemsets.size() >= k || s <= 1) break;
    s = std::max<std::size_t>(1, s / 2);
    r.lowered = true;
  }
  if (r.lowered) {
    r.warning = "support threshold lowered to " + std::to_string(r.min_support);
  }
  if (r.itemsets.size() < k) {
    r.warning += (r.warning.empty() ? "" : "; ") + std::string("only ") +
                 std::to_string(r.itemsets.size()) + " itemsets available";
  } else {
    r.itemsets.resize(k);
  }
  return r;
}

}  // namespace bundlegen::eval
