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
#include <cstdint>
#include <numeric>
#include <optional>
#include <random>
#include <vector>

#include "bundlegen/data/corpus.hpp"
#include "bundlegen/data/events.hpp"
#include "bundlegen/error.hpp"

namespace bundlegen::data {

// Planted-pattern corpus: every order is one of a fixed set of item patterns,
// optionally perturbed. Users prefer a few patterns, which gives the model a
// personalization signal that a global frequency ranking cannot use.
struct SyntheticOptions {
  std::uint64_t seed = 1;
  int n_users = 2000;
  int n_items = 500;
  int n_patterns = 60;
  double noise = 0.1;  // chance an order loses one item, and chance it gains one

  int n_categories = 20;
  int min_pattern_size = 2;
  int max_pattern_size = 5;
  int min_orders = 3;
  int max_orders = 7;
  int affinity_patterns = 2;
  double personal_rate = 0.8;  // share of orders drawn from preferred patterns
  bool category_patterns = true;  // a pattern's items share one category
  double popularity_skew = 0.5;   // Zipf exponent over pattern ranks
};

struct SyntheticCorpus {
  std::vector<RawEvent> events;
  std::vector<std::vector<RawId>> patterns;  // canonical order
  std::vector<double> pattern_weights;       // global popularity
  std::vector<std::size_t> pattern_orders;   // orders emitted per pattern
};

inline SyntheticCorpus make_synthetic_corpus(const SyntheticOptions& o) {
  if (o.n_users <= 0 || o.n_items <= 0 || o.n_patterns <= 0 || o.n_categories <= 0 ||
      o.min_pattern_size < 1 || o.max_pattern_size < o.min_pattern_size ||
      o.min_orders < 1 || o.max_orders < o.min_orders || o.noise < 0.0 ||
      o.noise > 1.0 || o.affinity_patterns < 1) {
    throw Error(ErrorKind::kInvalidArgument, "invalid synthetic corpus options");
  }
  std::mt19937_64 rng(o.seed);
  auto uniform_int = [&](int lo, int hi) {
    return std::uniform_int_distribution<int>(lo, hi)(rng);
  };
  auto coin = [&](double p) { return std::bernoulli_distribution(p)(rng); };

  // Items: category i % n_categories, log-normal price around a category level.
  Catalog catalog;
  std::vector<std::vector<RawId>> pool(o.n_categories);
  for (int i = 0; i < o.n_items; ++i) {
    const int c = i % o.n_categories;
    const double level = 2.0 + 0.5 * (c % 5);
    const double price =
        std::round(std::exp(std::normal_distribution<double>(level, 0.5)(rng)) * 100.0) /
        100.0;
    catalog[i] = CatalogEntry{c, price};
    pool[c].push_back(i);
  }
  for (auto& p : pool) std::shuffle(p.begin(), p.end(), rng);

  SyntheticCorpus out;
  std::vector<bool> used(o.n_items, false);
  auto take_unused = [&](std::vector<RawId>& from) -> std::optional<RawId> {
    while (!from.empty()) {
      const RawId id = from.back();
      from.pop_back();
      if (!used[id]) return id;
    }
    return std::nullopt;
  };
  std::vector<RawId> global(o.n_items);
  std::iota(global.begin(), global.end(), 0);
  std::shuffle(global.begin(), global.end(), rng);
  for (int p = 0; p < o.n_patterns; ++p) {
    const int size = std::min(uniform_int(o.min_pattern_size, o.max_pattern_size),
                              o.n_items);
    std::vector<RawId> items;
    const int c = p % o.n_categories;
    while (static_cast<int>(items.size()) < size) {
      std::optional<RawId> id;
      if (o.category_patterns) id = take_unused(pool[c]);
      if (!id) id = take_unused(global);
      if (!id) {
        // Every item is taken: overlap with earlier patterns.
        RawId r = uniform_int(0, o.n_items - 1);
        if (std::find(items.begin(), items.end(), r) != items.end()) continue;
        id = r;
      }
      used[*id] = true;
      items.push_back(*id);
    }
    out.patterns.push_back(canonical_raw(items, catalog));
    out.pattern_weights.push_back(1.0 / std::pow(p + 1.0, o.popularity_skew));
  }
  out.pattern_orders.assign(o.n_patterns, 0);
  std::discrete_distribution<int> popular(out.pattern_weights.begin(),
                                          out.pattern_weights.end());

  for (int u = 0; u < o.n_users; ++u) {
    std::vector<int> prefs;
    const int n_pref = std::min(o.affinity_patterns, o.n_patterns);
    while (static_cast<int>(prefs.size()) < n_pref) {
      const int p = popular(rng);
      if (std::find(prefs.begin(), prefs.end(), p) == prefs.end()) prefs.push_back(p);
    }
    const int n_orders = uniform_int(o.min_orders, o.max_orders);
    for (int k = 0; k < n_orders; ++k) {
      const int p = coin(o.personal_rate)
                        ? prefs[uniform_int(0, n_pref - 1)]
                        : popular(rng);
      ++out.pattern_orders[p];
      std::vector<RawId> items = out.patterns[p];
      if (o.noise > 0.0) {
        if (items.size() > 1 && coin(o.noise)) {
          items.erase(items.begin() + uniform_int(0, static_cast<int>(items.size()) - 1));
        }
        if (coin(o.noise)) {
          const RawId extra = uniform_int(0, o.n_items - 1);
          if (std::find(items.begin(), items.end(), extra) == items.end()) {
            items.push_back(extra);
          }
        }
      }
      for (RawId id : items) {
        const auto& e = catalog.at(id);
        out.events.push_back(RawEvent{u, k, id, e.cate, e.price});
      }
    }
  }
  return out;
}

}  // namespace bundlegen::data
