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

#include <cstdio>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <sstream>
#include <string>
#include <vector>

#include "bundlegen/data/corpus.hpp"
#include "bundlegen/eval/latency.hpp"
#include "bundlegen/eval/metrics.hpp"
#include "bundlegen/generate/generate.hpp"
#include "bundlegen/model/losses.hpp"
#include "json.hpp"

namespace bundlegen::eval {

using generate::GenerationConfig;

// Tokenized contexts of the test examples, in input order. Examples with an
// empty context are dropped.
inline std::vector<UserContext> test_contexts(std::span<const data::RawExample> test,
                                              const Vocabulary& vocab) {
  std::vector<UserContext> out;
  for (const auto& ex : test) {
    if (ex.context.empty()) continue;
    UserContext c;
    c.user = ex.user;
    for (RawId id : ex.context) c.history.push_back(vocab.token_for(id));
    out.push_back(std::move(c));
  }
  return out;
}

inline GroundTruth ground_truth(std::span<const data::RawExample> test) {
  GroundTruth gt;
  for (const auto& ex : test) gt[ex.user].push_back(RawItemSet(ex.target));
  return gt;
}

inline UserList to_user_list(RawId user, const BundleList& list, const Vocabulary& vocab) {
  UserList ul;
  ul.user = user;
  for (const Bundle& b : list.bundles) {
    std::vector<RawId> raw;
    for (ItemId id : b.items()) raw.push_back(vocab.raw_id(id));
    ul.bundles.emplace_back(std::move(raw));
  }
  return ul;
}

// Distinct bundles whose items are all in the vocabulary, the AUC negative pool.
inline std::vector<RawItemSet> bundle_pool(std::span<const data::RawExample> examples,
                                           const Vocabulary& vocab) {
  std::set<RawItemSet> seen;
  for (const auto& ex : examples) {
    bool known = !ex.target.empty();
    for (RawId id : ex.target) known = known && vocab.find(id).has_value();
    if (known) seen.insert(RawItemSet(ex.target));
  }
  return {seen.begin(), seen.end()};
}

// AUC with rank_score as the bundle score. Positive items missing from the
// vocabulary are dropped; positives left empty are skipped.
inline double model_auc(const model::QualityModel& m, std::span<const data::RawExample> test,
                        std::span<const RawItemSet> pool, std::uint64_t seed) {
  const Vocabulary& vocab = m.vocab();
  const numerics::Tensor weights = m.full_weight_matrix();
  std::vector<AucCase> cases;
  for (const auto& ex : test) {
    std::vector<RawId> known;
    for (RawId id : ex.target) {
      if (vocab.find(id)) known.push_back(id);
    }
    if (known.empty() || ex.context.empty()) continue;
    cases.push_back({ex.user, ex.context, RawItemSet(std::move(known))});
  }
  auto score = [&](const AucCase& c, const RawItemSet& b) {
    std::vector<ItemId> ctx;
    for (RawId id : c.context) ctx.push_back(vocab.token_for(id));
    std::vector<ItemId> items;
    for (RawId id : b) items.push_back(vocab.require(id));
    const Bundle canon = canonicalize_bundle(items, vocab);
    return model::rank_score(m, canon.items(), ctx, weights);
  };
  return auc(cases, pool, score, seed);
}

struct EvalReport {
  std::string run_id;
  GenerationConfig config;
  std::map<std::size_t, double> precision;  // k -> pre@k
  std::optional<double> diversity;
  std::optional<double> auc;
  std::optional<LatencyStats> latency;
  std::size_t users = 0;
  std::size_t skipped_users = 0;
};

// Precision for each k and diversity (when lists hold at least two bundles).
inline void score_lists(EvalReport& r, std::span<const UserList> lists, const GroundTruth& gt,
                        std::span<const std::size_t> ks) {
  for (std::size_t k : ks) {
    const auto p = precision_at_k_detailed(lists, gt, k);
    r.precision[k] = p.value;
    r.users = p.users;
    r.skipped_users = p.skipped;
  }
  if (!lists.empty() && lists.front().bundles.size() >= 2) r.diversity = diversity(lists);
}

inline nlohmann::json to_json(const EvalReport& r) {
  nlohmann::json j;
  j["run_id"] = r.run_id;
  j["config"] = generate::to_json(r.config);
  nlohmann::json pre = nlohmann::json::object();
  for (const auto& [k, v] : r.precision) pre["pre@" + std::to_string(k)] = v;
  j["precision"] = std::move(pre);
  j["diversity"] = r.diversity ? nlohmann::json(*r.diversity) : nlohmann::json(nullptr);
  j["auc"] = r.auc ? nlohmann::json(*r.auc) : nlohmann::json(nullptr);
  if (r.latency) {
    j["latency_ms"] = {{"mean", r.latency->mean_ms}, {"p95", r.latency->p95_ms},
                       {"calls", r.latency->calls}};
  } else {
    j["latency_ms"] = nullptr;
  }
  j["users"] = r.users;
  j["skipped_users"] = r.skipped_users;
  return j;
}

inline std::string csv_header() { return "run_id,lambda,C,M,K,pre@5,pre@10,div,auc,mean_latency_ms"; }

inline std::string csv_row(const EvalReport& r) {
  auto num = [](std::optional<double> v) {
    if (!v) return std::string();
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.6g", *v);
    return std::string(buf);
  };
  auto pre = [&](std::size_t k) {
    auto it = r.precision.find(k);
    return num(it == r.precision.end() ? std::nullopt : std::optional<double>(it->second));
  };
  std::ostringstream os;
  os << r.run_id << ',' << num(r.config.lambda) << ',' << r.config.shift << ','
     << r.config.beam_width << ',' << r.config.list_size << ',' << pre(5) << ',' << pre(10)
     << ',' << num(r.diversity) << ',' << num(r.auc) << ','
     << num(r.latency ? std::optional<double>(r.latency->mean_ms) : std::nullopt);
  return os.str();
}

}  // namespace bundlegen::eval
