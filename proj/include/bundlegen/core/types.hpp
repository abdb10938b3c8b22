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
#include <bit>
#include <cmath>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "bundlegen/error.hpp"

namespace bundlegen {

// Dense token id. Items occupy [0, N); special tokens follow.
using ItemId = std::int32_t;
// Identifier as it appears in input files.
using RawId = std::int64_t;

struct Item {
  ItemId id = 0;
  RawId raw_id = 0;
  std::optional<RawId> category;
  double price = 0.0;
};

// Sorted, duplicate-free set of ids. Bundles are unordered, so every
// set-level comparison (Jaccard, dedup, metrics) goes through this type.
template <class Id>
class SortedSet {
 public:
  SortedSet() = default;
  explicit SortedSet(std::vector<Id> ids) : ids_(std::move(ids)) {
    std::sort(ids_.begin(), ids_.end());
    ids_.erase(std::unique(ids_.begin(), ids_.end()), ids_.end());
  }
  SortedSet(std::initializer_list<Id> ids) : SortedSet(std::vector<Id>(ids)) {}

  std::size_t size() const { return ids_.size(); }
  bool empty() const { return ids_.empty(); }
  bool contains(Id id) const {
    return std::binary_search(ids_.begin(), ids_.end(), id);
  }
  const std::vector<Id>& ids() const { return ids_; }
  auto begin() const { return ids_.begin(); }
  auto end() const { return ids_.end(); }

  friend bool operator==(const SortedSet&, const SortedSet&) = default;
  friend auto operator<=>(const SortedSet& a, const SortedSet& b) {
    return a.ids_ <=> b.ids_;
  }

 private:
  std::vector<Id> ids_;
};

using ItemSet = SortedSet<ItemId>;
using RawItemSet = SortedSet<RawId>;

template <class Id>
std::size_t intersection_size(const SortedSet<Id>& a, const SortedSet<Id>& b) {
  std::size_t n = 0;
  auto i = a.begin();
  auto j = b.begin();
  while (i != a.end() && j != b.end()) {
    if (*i < *j) {
      ++i;
    } else if (*j < *i) {
      ++j;
    } else {
      ++n;
      ++i;
      ++j;
    }
  }
  return n;
}

// |a ∩ b| / |a ∪ b|.
template <class Id>
double jaccard(const SortedSet<Id>& a, const SortedSet<Id>& b) {
  if (a.empty() && b.empty()) {
    throw Error(ErrorKind::kDegenerateInput, "jaccard of two empty sets");
  }
  const std::size_t inter = intersection_size(a, b);
  const std::size_t uni = a.size() + b.size() - inter;
  return static_cast<double>(inter) / static_cast<double>(uni);
}

// Price-descending order with ties broken by ascending id; repeated ids keep
// their first occurrence. `price_of` maps an id to its price.
template <class Id, class PriceFn>
std::vector<Id> price_descending_order(std::span<const Id> ids,
                                       PriceFn&& price_of) {
  std::vector<Id> out;
  out.reserve(ids.size());
  for (Id id : ids) {
    if (std::find(out.begin(), out.end(), id) == out.end()) out.push_back(id);
  }
  std::vector<std::pair<double, Id>> keyed;
  keyed.reserve(out.size());
  for (Id id : out) keyed.emplace_back(price_of(id), id);
  std::sort(keyed.begin(), keyed.end(), [](const auto& x, const auto& y) {
    if (x.first != y.first) return x.first > y.first;
    return x.second < y.second;
  });
  for (std::size_t i = 0; i < keyed.size(); ++i) out[i] = keyed[i].second;
  return out;
}

class Vocabulary {
 public:
  Vocabulary() = default;

  // Items are re-indexed by ascending raw id, so dense order agrees with raw
  // order and price ties break identically in either id space.
  explicit Vocabulary(std::vector<Item> items) : items_(std::move(items)) {
    std::sort(items_.begin(), items_.end(),
              [](const Item& a, const Item& b) { return a.raw_id < b.raw_id; });
    for (std::size_t i = 1; i < items_.size(); ++i) {
      if (items_[i].raw_id == items_[i - 1].raw_id) {
        throw Error(ErrorKind::kInvalidArgument,
                    "duplicate item id " + std::to_string(items_[i].raw_id));
      }
    }
    std::vector<RawId> cats;
    for (std::size_t i = 0; i < items_.size(); ++i) {
      Item& it = items_[i];
      if (it.price < 0.0 || !std::isfinite(it.price)) {
        throw Error(ErrorKind::kInvalidArgument,
                    "negative price for item " + std::to_string(it.raw_id));
      }
      it.id = static_cast<ItemId>(i);
      by_raw_.emplace(it.raw_id, it.id);
      if (it.category) cats.push_back(*it.category);
    }
    std::sort(cats.begin(), cats.end());
    cats.erase(std::unique(cats.begin(), cats.end()), cats.end());
    categories_ = cats;
    category_index_.assign(items_.size(), -1);
    for (const Item& it : items_) {
      if (it.category) {
        category_index_[it.id] = static_cast<std::int32_t>(
            std::lower_bound(cats.begin(), cats.end(), *it.category) -
            cats.begin());
      }
    }
    // log(1 + price), standardized over this catalog.
    double mean = 0.0;
    for (const Item& it : items_) mean += std::log1p(it.price);
    if (!items_.empty()) mean /= static_cast<double>(items_.size());
    double var = 0.0;
    for (const Item& it : items_) {
      const double d = std::log1p(it.price) - mean;
      var += d * d;
    }
    if (!items_.empty()) var /= static_cast<double>(items_.size());
    const double sd = var > 0.0 ? std::sqrt(var) : 1.0;
    price_feature_.resize(items_.size());
    for (const Item& it : items_) {
      price_feature_[it.id] = (std::log1p(it.price) - mean) / sd;
    }
  }

  ItemId size() const { return static_cast<ItemId>(items_.size()); }
  ItemId pad() const { return size(); }
  ItemId bos() const { return size() + 1; }
  ItemId end() const { return size() + 2; }
  ItemId unk() const { return size() + 3; }
  ItemId token_count() const { return size() + 4; }

  bool is_item(ItemId id) const { return id >= 0 && id < size(); }

  const Item& item(ItemId id) const {
    if (!is_item(id)) {
      throw Error(ErrorKind::kUnknownItem, "item id " + std::to_string(id));
    }
    return items_[id];
  }

  const std::vector<Item>& items() const { return items_; }

  std::optional<ItemId> find(RawId raw) const {
    auto it = by_raw_.find(raw);
    if (it == by_raw_.end()) return std::nullopt;
    return it->second;
  }

  ItemId token_for(RawId raw) const { return find(raw).value_or(unk()); }

  ItemId require(RawId raw) const {
    auto id = find(raw);
    if (!id) throw Error(ErrorKind::kUnknownItem, "item " + std::to_string(raw));
    return *id;
  }

  RawId raw_id(ItemId id) const { return item(id).raw_id; }

  std::int32_t n_categories() const {
    return static_cast<std::int32_t>(categories_.size());
  }

  // Dense category index, or -1 when the token has no category.
  std::int32_t category_index(ItemId id) const {
    return is_item(id) ? category_index_[id] : -1;
  }

  double price_feature(ItemId id) const {
    return is_item(id) ? price_feature_[id] : 0.0;
  }

  // FNV-1a over the catalog; checkpoints record it to refuse mismatched data.
  std::uint64_t hash() const {
    std::uint64_t h = 1469598103934665603ULL;
    auto mix = [&h](std::uint64_t v) {
      for (int b = 0; b < 8; ++b) {
        h ^= (v >> (8 * b)) & 0xffU;
        h *= 1099511628211ULL;
      }
    };
    for (const Item& it : items_) {
      mix(static_cast<std::uint64_t>(it.raw_id));
      mix(it.category ? static_cast<std::uint64_t>(*it.category)
                      : 0xffffffffffffffffULL);
      mix(std::bit_cast<std::uint64_t>(it.price));
    }
    return h;
  }

 private:
  std::vector<Item> items_;
  std::unordered_map<RawId, ItemId> by_raw_;
  std::vector<RawId> categories_;
  std::vector<std::int32_t> category_index_;
  std::vector<double> price_feature_;
};

class Bundle {
 public:
  Bundle() = default;
  explicit Bundle(std::vector<ItemId> items, bool canonical_order = false)
      : items_(std::move(items)), canonical_(canonical_order) {
    if (items_.empty()) {
      throw Error(ErrorKind::kDegenerateInput, "empty bundle");
    }
    ItemSet s(items_);
    if (s.size() != items_.size()) {
      throw Error(ErrorKind::kDegenerateInput, "bundle repeats an item");
    }
  }

  const std::vector<ItemId>& items() const { return items_; }
  std::size_t size() const { return items_.size(); }
  bool canonical_order() const { return canonical_; }

  friend bool operator==(const Bundle& a, const Bundle& b) {
    return a.items_ == b.items_;
  }

 private:
  std::vector<ItemId> items_;
  bool canonical_ = false;
};

inline Bundle canonicalize_bundle(std::span<const ItemId> items,
                                  const Vocabulary& vocab) {
  if (items.empty()) {
    throw Error(ErrorKind::kDegenerateInput, "empty item sequence");
  }
  for (ItemId id : items) (void)vocab.item(id);
  return Bundle(price_descending_order<ItemId>(
                    items, [&](ItemId id) { return vocab.item(id).price; }),
                true);
}

inline ItemSet bundle_as_set(const Bundle& b) { return ItemSet(b.items()); }

struct BundleList {
  std::vector<Bundle> bundles;
  std::vector<double> scores;  // log p(b | C_u) per bundle, when known

  std::size_t size() const { return bundles.size(); }
};

struct UserContext {
  RawId user = 0;
  std::vector<ItemId> history;  // oldest first
};

}  // namespace bundlegen
