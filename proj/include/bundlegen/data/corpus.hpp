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
#include <cstdio>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <map>
#include <numeric>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "bundlegen/core/types.hpp"
#include "bundlegen/data/events.hpp"
#include "bundlegen/error.hpp"

namespace bundlegen::data {

// One bundle behavior of a user, in raw ids and canonical order.
struct RawBundle {
  RawId key = 0;  // order key or sequence number
  std::vector<RawId> items;

  friend bool operator==(const RawBundle&, const RawBundle&) = default;
};

struct UserHistory {
  RawId user = 0;
  std::vector<RawBundle> bundles;  // ascending key
};

// Co-purchase logs keep single-item bundles for training and need at least
// two behaviors per user; pre-defined bundle corpora need three.
enum class CorpusKind { kCoPurchase, kPredefined };

inline const char* to_string(CorpusKind k) {
  return k == CorpusKind::kCoPurchase ? "co-purchase" : "predefined";
}

inline CorpusKind corpus_kind_from_string(const std::string& s) {
  if (s == "co-purchase") return CorpusKind::kCoPurchase;
  if (s == "predefined") return CorpusKind::kPredefined;
  throw Error(ErrorKind::kInvalidArgument, "unknown corpus kind " + s);
}

inline std::size_t min_behaviors(CorpusKind k) {
  return k == CorpusKind::kCoPurchase ? 2 : 3;
}

inline std::vector<RawId> canonical_raw(std::span<const RawId> items,
                                        const Catalog& catalog) {
  return price_descending_order<RawId>(items, [&](RawId id) {
    auto it = catalog.find(id);
    if (it == catalog.end()) {
      throw Error(ErrorKind::kUnknownItem, "item " + std::to_string(id));
    }
    return it->second.price;
  });
}

// Groups events by (user, order key); each group becomes one canonical bundle.
// Users come out in ascending id, bundles in ascending order key.
inline std::vector<UserHistory> group_bundles(const std::vector<RawEvent>& events,
                                              const Catalog& catalog) {
  std::map<RawId, std::map<RawId, std::vector<RawId>>> grouped;
  for (const RawEvent& e : events) grouped[e.user][e.order].push_back(e.item);
  std::vector<UserHistory> out;
  out.reserve(grouped.size());
  for (auto& [user, orders] : grouped) {
    UserHistory h{user, {}};
    for (auto& [key, items] : orders) {
      h.bundles.push_back(RawBundle{key, canonical_raw(items, catalog)});
    }
    out.push_back(std::move(h));
  }
  return out;
}

inline std::vector<UserHistory> group_bundles(const std::vector<RawEvent>& events) {
  return group_bundles(events, catalog_from_events(events));
}

struct RawExample {
  RawId user = 0;
  std::vector<RawId> context;  // concatenated prefix bundles, oldest first
  std::vector<RawId> target;   // canonical order

  friend bool operator==(const RawExample&, const RawExample&) = default;
};

enum class ExampleMode { kTrain, kTest };

struct PrefixExamples {
  std::vector<RawExample> examples;
  std::size_t skipped_users = 0;     // too few behaviors
  std::size_t filtered_targets = 0;  // single-item co-purchase test targets
};

// Train: the first k behaviors predict the (k+1)-th for k = 1..K-2.
// Test: the first K-1 behaviors predict the last one.
inline PrefixExamples build_prefix_examples(const std::vector<UserHistory>& users,
                                            ExampleMode mode, CorpusKind kind) {
  PrefixExamples out;
  for (const UserHistory& u : users) {
    const std::size_t n = u.bundles.size();
    if (n < min_behaviors(kind)) {
      ++out.skipped_users;
      continue;
    }
    auto context_of = [&](std::size_t k) {
      std::vector<RawId> ctx;
      for (std::size_t i = 0; i < k; ++i) {
        ctx.insert(ctx.end(), u.bundles[i].items.begin(), u.bundles[i].items.end());
      }
      return ctx;
    };
    if (mode == ExampleMode::kTrain) {
      for (std::size_t k = 1; k + 1 < n; ++k) {
        out.examples.push_back(RawExample{u.user, context_of(k), u.bundles[k].items});
      }
    } else {
      const auto& last = u.bundles[n - 1].items;
      if (kind == CorpusKind::kCoPurchase && last.size() < 2) {
        ++out.filtered_targets;
        continue;
      }
      out.examples.push_back(RawExample{u.user, context_of(n - 1), last});
    }
  }
  return out;
}

struct DatasetSplit {
  std::vector<RawExample> train;
  std::vector<RawExample> valid;
  std::vector<RawExample> test;
  Vocabulary vocab;
  CorpusKind kind = CorpusKind::kCoPurchase;
  std::uint64_t seed = 0;
  std::size_t skipped_users = 0;
  std::size_t filtered_targets = 0;
};

inline Vocabulary vocabulary_from(const std::vector<RawExample>& examples,
                                  const Catalog& catalog) {
  std::set<RawId> seen;
  for (const RawExample& ex : examples) {
    seen.insert(ex.context.begin(), ex.context.end());
    seen.insert(ex.target.begin(), ex.target.end());
  }
  std::vector<Item> items;
  items.reserve(seen.size());
  for (RawId id : seen) {
    auto it = catalog.find(id);
    if (it == catalog.end()) {
      throw Error(ErrorKind::kUnknownItem, "item " + std::to_string(id));
    }
    items.push_back(Item{0, id, it->second.cate, it->second.price});
  }
  return Vocabulary(std::move(items));
}

// Builds train/validation/test examples. A seeded `valid_fraction` of the
// training examples is held out for validation; the vocabulary covers the
// remaining training examples only.
inline DatasetSplit make_split(const std::vector<UserHistory>& users,
                               const Catalog& catalog, CorpusKind kind,
                               std::uint64_t seed, double valid_fraction = 0.1) {
  DatasetSplit split;
  split.kind = kind;
  split.seed = seed;
  auto train = build_prefix_examples(users, ExampleMode::kTrain, kind);
  auto test = build_prefix_examples(users, ExampleMode::kTest, kind);
  split.skipped_users = test.skipped_users;
  split.filtered_targets = test.filtered_targets;

  std::vector<std::size_t> order(train.examples.size());
  std::iota(order.begin(), order.end(), 0);
  std::mt19937_64 rng(seed);
  std::shuffle(order.begin(), order.end(), rng);
  const auto n_valid = static_cast<std::size_t>(
      valid_fraction * static_cast<double>(train.examples.size()));
  std::vector<bool> held(train.examples.size(), false);
  for (std::size_t i = 0; i < n_valid; ++i) held[order[i]] = true;
  for (std::size_t i = 0; i < train.examples.size(); ++i) {
    (held[i] ? split.valid : split.train).push_back(std::move(train.examples[i]));
  }
  split.test = std::move(test.examples);
  if (split.train.empty()) {
    throw Error(ErrorKind::kEmptyCorpus, "no training examples");
  }
  split.vocab = vocabulary_from(split.train, catalog);
  return split;
}

struct CorpusStats {
  std::size_t n_items = 0;
  std::size_t n_users = 0;
  std::size_t n_categories = 0;
  std::size_t n_records = 0;  // bundle behaviors
  std::size_t n_distinct_bundles = 0;
  double avg_bundle_size = 0.0;  // mean over behaviors
};

inline CorpusStats compute_stats(const std::vector<UserHistory>& users,
                                 const Catalog& catalog) {
  CorpusStats s;
  std::set<RawId> items;
  std::set<RawId> cats;
  std::set<std::vector<RawId>> distinct;
  std::size_t total = 0;
  for (const UserHistory& u : users) {
    if (u.bundles.empty()) continue;
    ++s.n_users;
    for (const RawBundle& b : u.bundles) {
      ++s.n_records;
      total += b.items.size();
      std::vector<RawId> key = b.items;
      std::sort(key.begin(), key.end());
      distinct.insert(key);
      for (RawId id : b.items) {
        items.insert(id);
        auto it = catalog.find(id);
        if (it != catalog.end() && it->second.cate) cats.insert(*it->second.cate);
      }
    }
  }
  if (s.n_records == 0) throw Error(ErrorKind::kEmptyCorpus, "corpus has no bundles");
  s.n_items = items.size();
  s.n_categories = cats.size();
  s.n_distinct_bundles = distinct.size();
  s.avg_bundle_size = static_cast<double>(total) / static_cast<double>(s.n_records);
  return s;
}

inline json stats_to_json(const CorpusStats& s) {
  return json{{"items", s.n_items},
              {"users", s.n_users},
              {"categories", s.n_categories},
              {"records", s.n_records},
              {"bundles", s.n_distinct_bundles},
              {"avg_bundle_size", s.avg_bundle_size}};
}

// Table-style block for terminals.
inline std::string format_stats(const CorpusStats& s) {
  char buf[512];
  std::snprintf(buf, sizeof(buf),
                "Items                %zu\n"
                "Users                %zu\n"
                "Categories           %zu\n"
                "Records              %zu\n"
                "Bundles              %zu\n"
                "Average Bundle Size  %.2f\n",
                s.n_items, s.n_users, s.n_categories, s.n_records,
                s.n_distinct_bundles, s.avg_bundle_size);
  return buf;
}

// Pre-defined bundle corpus: {"user":int,"seq":int,"bundle":[int,...]} lines
// plus an item catalog. Bundles are canonicalized against the catalog.
inline std::vector<UserHistory> load_bundle_corpus(const std::string& bundles_path,
                                                   const Catalog& catalog) {
  std::map<RawId, std::map<RawId, std::vector<RawId>>> grouped;
  detail::for_each_jsonl(bundles_path, [&](const json& obj, std::size_t line) {
    const RawId user = detail::require_id(obj, "user", line);
    const RawId seq = detail::require_id(obj, "seq", line);
    auto it = obj.find("bundle");
    if (it == obj.end() || !it->is_array() || it->empty()) {
      throw ParseError(line, "\"bundle\" must be a non-empty array");
    }
    std::vector<RawId> items;
    for (const json& v : *it) {
      if (!v.is_number_integer() || v.get<std::int64_t>() < 0) {
        throw ParseError(line, "bundle entries must be non-negative integers");
      }
      items.push_back(v.get<RawId>());
    }
    auto& slot = grouped[user][seq];
    if (!slot.empty()) throw ParseError(line, "duplicate (user, seq)");
    slot = std::move(items);
  });
  std::vector<UserHistory> out;
  for (auto& [user, seqs] : grouped) {
    UserHistory h{user, {}};
    for (auto& [seq, items] : seqs) {
      h.bundles.push_back(RawBundle{seq, canonical_raw(items, catalog)});
    }
    out.push_back(std::move(h));
  }
  return out;
}

// ---- persistence ---------------------------------------------------------

inline json example_to_json(const RawExample& ex) {
  return json{{"user", ex.user}, {"context", ex.context}, {"target", ex.target}};
}

inline RawExample example_from_json(const json& obj, std::size_t line) {
  RawExample ex;
  ex.user = detail::require_id(obj, "user", line);
  try {
    ex.context = obj.at("context").get<std::vector<RawId>>();
    ex.target = obj.at("target").get<std::vector<RawId>>();
  } catch (const json::exception& e) {
    throw ParseError(line, e.what());
  }
  if (ex.context.empty() || ex.target.empty()) {
    throw ParseError(line, "empty context or target");
  }
  return ex;
}

inline void write_examples(const std::string& path,
                           const std::vector<RawExample>& examples) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorKind::kIo, "cannot write " + path);
  for (const RawExample& ex : examples) out << example_to_json(ex).dump() << '\n';
}

inline std::vector<RawExample> load_examples(const std::string& path) {
  std::vector<RawExample> out;
  detail::for_each_jsonl(path, [&](const json& obj, std::size_t line) {
    out.push_back(example_from_json(obj, line));
  });
  return out;
}

inline std::string hash_hex(std::uint64_t h) {
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

inline Catalog catalog_of(const Vocabulary& vocab) {
  Catalog cat;
  for (const Item& it : vocab.items()) cat[it.raw_id] = CatalogEntry{it.category, it.price};
  return cat;
}

inline Vocabulary vocabulary_of(const Catalog& cat) {
  std::vector<Item> items;
  for (const auto& [id, e] : cat) items.push_back(Item{0, id, e.cate, e.price});
  return Vocabulary(std::move(items));
}

// Writes train/valid/test JSONL, the vocabulary catalog and a manifest.
inline void save_split(const std::filesystem::path& dir, const DatasetSplit& split,
                       const json& extra_manifest = json::object()) {
  std::filesystem::create_directories(dir);
  write_examples((dir / "train.jsonl").string(), split.train);
  write_examples((dir / "valid.jsonl").string(), split.valid);
  write_examples((dir / "test.jsonl").string(), split.test);
  write_catalog((dir / "catalog.jsonl").string(), catalog_of(split.vocab));
  json m = extra_manifest;
  m["kind"] = to_string(split.kind);
  m["seed"] = split.seed;
  m["counts"] = {{"train", split.train.size()},
                 {"valid", split.valid.size()},
                 {"test", split.test.size()},
                 {"items", split.vocab.size()},
                 {"skipped_users", split.skipped_users},
                 {"filtered_targets", split.filtered_targets}};
  m["vocab_hash"] = hash_hex(split.vocab.hash());
  std::ofstream out(dir / "manifest.json");
  if (!out) throw Error(ErrorKind::kIo, "cannot write manifest in " + dir.string());
  out << m.dump(2) << '\n';
}

inline json load_manifest(const std::filesystem::path& dir) {
  std::ifstream in(dir / "manifest.json");
  if (!in) throw Error(ErrorKind::kIo, "no manifest in " + dir.string());
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw Error(ErrorKind::kParseError, std::string("manifest: ") + e.what());
  }
}

inline DatasetSplit load_split(const std::filesystem::path& dir) {
  const json m = load_manifest(dir);
  DatasetSplit split;
  split.kind = corpus_kind_from_string(m.at("kind").get<std::string>());
  split.seed = m.at("seed").get<std::uint64_t>();
  split.skipped_users = m.at("counts").value("skipped_users", std::size_t{0});
  split.filtered_targets = m.at("counts").value("filtered_targets", std::size_t{0});
  split.train = load_examples((dir / "train.jsonl").string());
  split.valid = load_examples((dir / "valid.jsonl").string());
  split.test = load_examples((dir / "test.jsonl").string());
  split.vocab = vocabulary_of(load_catalog((dir / "catalog.jsonl").string()));
  if (hash_hex(split.vocab.hash()) != m.at("vocab_hash").get<std::string>()) {
    throw Error(ErrorKind::kIncompatibleArtifact,
                "catalog does not match manifest in " + dir.string());
  }
  return split;
}

}  // namespace bundlegen::data
