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

#include <cmath>
#include <set>
#include <sstream>
#include <thread>
#include <vector>

#include <gtest/gtest.h>

#include "bundlegen/data/synthetic.hpp"
#include "bundlegen/eval/evaluate.hpp"
#include "bundlegen/eval/freq.hpp"
#include "bundlegen/eval/oracle.hpp"
#include "oracles.hpp"
#include "support.hpp"

using namespace bundlegen;
using namespace bundlegen::eval;

namespace {

std::vector<RawItemSet> sets(std::initializer_list<std::initializer_list<RawId>> xs) {
  std::vector<RawItemSet> out;
  for (auto x : xs) out.emplace_back(x);
  return out;
}

}  // namespace

TEST(Precision, HandCases) {
  GroundTruth gt{{1, sets({{1, 2, 3}})}};
  std::vector<UserList> exact{{1, sets({{1, 2, 3}})}};
  EXPECT_DOUBLE_EQ(precision_at_k(exact, gt, 1), 1.0);
  std::vector<UserList> partial{{1, sets({{1, 2}})}};
  EXPECT_DOUBLE_EQ(precision_at_k(partial, gt, 1), 2.0 / 3.0);
  std::vector<UserList> two{{1, sets({{1, 2, 3}, {7}})}};
  EXPECT_DOUBLE_EQ(precision_at_k(two, gt, 2), 0.5);
  EXPECT_DOUBLE_EQ(precision_at_k(two, gt, 1), 1.0);
}

TEST(Precision, BestGroundTruthAndSkippedUsers) {
  GroundTruth gt{{1, sets({{1, 2}, {5, 6}})}, {2, sets({{9}})}};
  std::vector<UserList> lists{{1, sets({{5, 6}, {1}})}, {2, sets({{8}, {9}})}, {3, sets({{1}, {2}})}};
  const auto r = precision_at_k_detailed(lists, gt, 2);
  EXPECT_EQ(r.users, 2u);
  EXPECT_EQ(r.skipped, 1u);
  EXPECT_DOUBLE_EQ(r.value, ((1.0 + 0.5) / 2 + (0.0 + 1.0) / 2) / 2);
}

TEST(Precision, ShortListAndZeroK) {
  GroundTruth gt{{1, sets({{1}})}};
  std::vector<UserList> lists{{1, sets({{1}})}};
  try {
    precision_at_k(lists, gt, 2);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::kShortList);
  }
  EXPECT_THROW(precision_at_k(lists, gt, 0), Error);
}

TEST(Diversity, HandCases) {
  EXPECT_DOUBLE_EQ(list_diversity(sets({{1, 2}, {1, 2}})), 0.0);
  EXPECT_DOUBLE_EQ(list_diversity(sets({{1}, {2}, {3}})), 1.0);
  EXPECT_DOUBLE_EQ(list_diversity(sets({{1, 2}, {2, 3}})), 1.0 - 1.0 / 3.0);
  // Pairs: {1,2}-{1,2,3} 2/3, {1,2}-{4} 0, {1,2,3}-{4} 0.
  EXPECT_DOUBLE_EQ(list_diversity(sets({{1, 2}, {1, 2, 3}, {4}})), (1.0 / 3.0 + 1.0 + 1.0) / 3.0);
  try {
    list_diversity(sets({{1}}));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::kDegenerateList);
  }
}

TEST(Diversity, MatchesOracleJaccard) {
  std::mt19937_64 rng(3);
  std::uniform_int_distribution<int> item(0, 9), size(1, 4);
  for (int rep = 0; rep < 20; ++rep) {
    std::vector<RawItemSet> list;
    std::vector<std::vector<int>> plain;
    for (int b = 0; b < 5; ++b) {
      std::vector<RawId> ids;
      for (int k = size(rng); k > 0; --k) ids.push_back(item(rng));
      list.emplace_back(ids);
      plain.emplace_back(list.back().begin(), list.back().end());
    }
    double want = 0.0;
    for (int a = 0; a < 5; ++a) {
      for (int b = 0; b < 5; ++b) {
        if (a != b) want += 1.0 - oracle::jaccard(plain[a], plain[b]);
      }
    }
    EXPECT_NEAR(list_diversity(list), want / 20.0, 1e-15);
  }
}

TEST(Auc, PerfectInvertedAndRandom) {
  std::vector<AucCase> cases;
  std::vector<RawItemSet> pool;
  for (RawId i = 0; i < 50; ++i) pool.push_back(RawItemSet{i, i + 100});
  for (RawId i = 0; i < 2000; ++i) cases.push_back({i, {}, pool[i % 50]});
  const std::set<RawItemSet> positives(pool.begin(), pool.end());
  auto good = [](const AucCase& c, const RawItemSet& b) { return b == c.positive ? 1.0 : 0.0; };
  auto bad = [](const AucCase& c, const RawItemSet& b) { return b == c.positive ? 0.0 : 1.0; };
  EXPECT_EQ(auc(cases, pool, good, 1), 1.0);
  EXPECT_EQ(auc(cases, pool, bad, 1), 0.0);
  auto constant = [](const AucCase&, const RawItemSet&) { return 3.0; };
  EXPECT_EQ(auc(cases, pool, constant, 1), 0.5);

  std::mt19937_64 noise(5);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  auto random = [&](const AucCase&, const RawItemSet&) { return u(noise); };
  const double sigma = std::sqrt(0.25 / static_cast<double>(cases.size()));
  EXPECT_NEAR(auc(cases, pool, random, 2), 0.5, 3.0 * sigma);
}

TEST(Auc, NeverDrawsThePositive) {
  const auto pool = sets({{1}, {2}});
  std::vector<AucCase> cases(100, AucCase{0, {}, RawItemSet{1}});
  auto score = [](const AucCase&, const RawItemSet& b) { return b == RawItemSet{1} ? 1.0 : 0.0; };
  EXPECT_EQ(auc(cases, pool, score, 4), 1.0);
}

TEST(Auc, Errors) {
  std::vector<AucCase> cases{{0, {}, RawItemSet{1}}};
  auto score = [](const AucCase&, const RawItemSet&) { return 0.0; };
  EXPECT_THROW(auc(cases, {}, score, 1), Error);
  EXPECT_THROW(auc(cases, sets({{1}}), score, 1), Error);
  EXPECT_THROW(auc({}, sets({{1}}), score, 1), Error);
}

TEST(Apriori, CountsSupport) {
  const auto orders = sets({{1, 2, 3}, {1, 2}, {2, 3}, {1, 2, 4}});
  const auto levels = apriori(orders, 2);
  ASSERT_GE(levels.size(), 2u);
  std::map<RawItemSet, std::size_t> support;
  for (const auto& level : levels) {
    for (const auto& f : level) support[f.items] = f.support;
  }
  EXPECT_EQ(support.at(RawItemSet{2}), 4u);
  EXPECT_EQ(support.at((RawItemSet{1, 2})), 3u);
  EXPECT_EQ(support.at((RawItemSet{2, 3})), 2u);
  EXPECT_FALSE(support.count(RawItemSet{4}));
  EXPECT_FALSE(support.count((RawItemSet{1, 2, 3})));
}

TEST(Freq, DominantPairRanksFirst) {
  std::vector<RawItemSet> orders;
  for (int i = 0; i < 80; ++i) orders.push_back(RawItemSet{10, 20});
  for (int i = 0; i < 10; ++i) orders.push_back(RawItemSet{30, 40});
  for (int i = 0; i < 10; ++i) orders.push_back(RawItemSet{static_cast<RawId>(50 + i)});
  const auto r = freq_baseline(orders, 2);
  ASSERT_EQ(r.itemsets.size(), 2u);
  EXPECT_EQ(r.itemsets[0].items, (RawItemSet{10, 20}));
  EXPECT_EQ(r.itemsets[0].support, 80u);
  EXPECT_EQ(r.itemsets[1].items, (RawItemSet{30, 40}));
  EXPECT_FALSE(r.lowered);
  EXPECT_TRUE(r.warning.empty());
}

TEST(Freq, OnlyClosedSetsOfTwoOrMore) {
  const auto orders = sets({{1, 2, 3}, {1, 2, 3}, {1, 2}, {4, 5}, {4, 5}});
  const auto r = freq_baseline(orders, 3);
  // {1,3}, {2,3} have the same support as {1,2,3} and are not closed.
  ASSERT_EQ(r.itemsets.size(), 3u);
  EXPECT_EQ(r.itemsets[0].items, (RawItemSet{1, 2}));
  EXPECT_EQ(r.itemsets[1].items, (RawItemSet{1, 2, 3}));
  EXPECT_EQ(r.itemsets[2].items, (RawItemSet{4, 5}));
}

TEST(Freq, LowersThresholdWithWarning) {
  const auto orders = sets({{1, 2}, {3, 4}, {3, 4}, {5, 6}});
  const auto r = freq_baseline(orders, 3);
  EXPECT_TRUE(r.lowered);
  EXPECT_EQ(r.min_support, 1u);
  EXPECT_FALSE(r.warning.empty());
  ASSERT_EQ(r.itemsets.size(), 3u);
  EXPECT_EQ(r.itemsets[0].items, (RawItemSet{3, 4}));

  const auto few = freq_baseline(sets({{1, 2}}), 4);
  EXPECT_EQ(few.itemsets.size(), 1u);
  EXPECT_NE(few.warning.find("only 1"), std::string::npos);
}

TEST(Freq, RecoversPlantedPatterns) {
  for (int n_patterns : {1, 6}) {
    data::SyntheticOptions o;
    o.n_users = 300;
    o.n_items = 80;
    o.n_patterns = n_patterns;
    o.noise = 0.0;
    o.n_categories = 8;
    const auto corpus = data::make_synthetic_corpus(o);
    std::vector<RawItemSet> orders;
    for (const auto& u : data::group_bundles(corpus.events)) {
      for (const auto& b : u.bundles) orders.emplace_back(b.items);
    }
    const auto r = freq_baseline(orders, static_cast<std::size_t>(n_patterns));
    std::set<RawItemSet> want, got;
    for (const auto& p : corpus.patterns) want.emplace(p);
    for (const auto& f : r.itemsets) got.insert(f.items);
    EXPECT_EQ(got, want);
    for (std::size_t i = 0; i < r.itemsets.size(); ++i) {
      const auto& f = r.itemsets[i];
      for (std::size_t p = 0; p < corpus.patterns.size(); ++p) {
        if (RawItemSet(corpus.patterns[p]) == f.items) {
          EXPECT_EQ(f.support, corpus.pattern_orders[p]);
        }
      }
      if (i > 0) {
        EXPECT_GE(r.itemsets[i - 1].support, f.support);
      }
    }
  }
}

TEST(Oracle, TinyCatalogHasAllBundles) {
  const model::QualityModel m(testing_support::tiny_config(), testing_support::small_vocab(3));
  const generate::InferenceModel im(m);
  const std::vector<ItemId> ctx{0, 2};
  const auto all = exhaustive_candidates(im, ctx, 2);
  EXPECT_EQ(all.size(), 6u);  // 3 singletons + 3 pairs
  const auto top = exhaustive_topk_oracle(im, ctx, 2, 4);
  ASSERT_EQ(top.size(), 4u);
  for (std::size_t i = 0; i < 4; ++i) EXPECT_EQ(top.scores[i], all[i].log_prob);

  generate::GenerationConfig cfg;
  cfg.beam_width = 20;
  cfg.list_size = 4;
  cfg.max_bundle_size = 2;
  const auto beam = generate::generate(im, ctx, cfg);
  for (std::size_t i = 0; i < 4; ++i) {
    EXPECT_EQ(beam.bundles[i], top.bundles[i]);
    EXPECT_NEAR(beam.scores[i], top.scores[i], 1e-12);
  }
}

TEST(Oracle, RefusesLargeProblems) {
  const model::QualityModel big(testing_support::tiny_config(), testing_support::small_vocab(9));
  const model::QualityModel small(testing_support::tiny_config(), testing_support::small_vocab(4));
  const std::vector<ItemId> ctx{0};
  EXPECT_THROW(exhaustive_candidates(generate::InferenceModel(big), ctx, 2), Error);
  EXPECT_THROW(exhaustive_candidates(generate::InferenceModel(small), ctx, 4), Error);
  EXPECT_THROW(exhaustive_candidates(generate::InferenceModel(small), ctx, 0), Error);
}

TEST(Latency, StatsAndErrors) {
  EXPECT_THROW(measure_latency([](std::size_t) {}, 0), Error);
  std::size_t calls = 0;
  const auto s = measure_latency(
      [&](std::size_t) {
        ++calls;
        std::this_thread::sleep_for(std::chrono::milliseconds(2));
      },
      20, 2);
  EXPECT_EQ(s.calls, 20u);
  EXPECT_EQ(calls, 22u);
  EXPECT_GE(s.mean_ms, 1.9);
  EXPECT_GE(s.p95_ms, s.mean_ms * 0.9);
  EXPECT_LT(s.mean_ms, 50.0);
}

TEST(Latency, StableAcrossRepeats) {
  auto work = [](std::size_t) {
    volatile double x = 0.0;
    for (int i = 0; i < 200000; ++i) x = x + std::sqrt(static_cast<double>(i));
  };
  const auto a = measure_latency(work, 30);
  const auto b = measure_latency(work, 30);
  EXPECT_LT(std::abs(a.mean_ms - b.mean_ms), 0.5 * std::max(a.mean_ms, b.mean_ms));
}

TEST(Report, CsvAndJson) {
  EvalReport r;
  r.run_id = "run1";
  r.config.lambda = 0.5;
  r.config.shift = 2;
  r.config.beam_width = 20;
  r.config.list_size = 10;
  GroundTruth gt{{1, sets({{1, 2}})}};
  std::vector<UserList> lists{{1, sets({{1, 2}, {3}, {1}, {4}, {5}, {6}, {7}, {8}, {9}, {10}})}};
  const std::size_t ks[] = {5, 10};
  score_lists(r, lists, gt, ks);
  EXPECT_DOUBLE_EQ(r.precision.at(5), (1.0 + 0.5) / 5.0);
  EXPECT_DOUBLE_EQ(r.precision.at(10), (1.0 + 0.5) / 10.0);
  ASSERT_TRUE(r.diversity.has_value());
  r.latency = LatencyStats{1.25, 2.0, 1};
  EXPECT_EQ(csv_header(), "run_id,lambda,C,M,K,pre@5,pre@10,div,auc,mean_latency_ms");
  const std::string row = csv_row(r);
  EXPECT_EQ(row.rfind("run1,0.5,2,20,10,0.3,0.15,", 0), 0u) << row;
  EXPECT_EQ(row.substr(row.size() - 6), ",,1.25");
  const auto j = to_json(r);
  EXPECT_EQ(j["precision"]["pre@5"], 0.3);
  EXPECT_TRUE(j["auc"].is_null());
  EXPECT_EQ(j["latency_ms"]["mean"], 1.25);
  EXPECT_EQ(j["users"], 1);
}

TEST(Evaluate, RawIdPipeline) {
  const Vocabulary v = testing_support::small_vocab(4);
  std::vector<data::RawExample> test{{7, {100, 999}, {101, 102}}, {8, {}, {100}}};
  const auto ctx = test_contexts(test, v);
  ASSERT_EQ(ctx.size(), 1u);
  EXPECT_EQ(ctx[0].history, (std::vector<ItemId>{0, v.unk()}));
  const auto gt = ground_truth(test);
  EXPECT_EQ(gt.at(7).front(), (RawItemSet{101, 102}));
  BundleList list;
  list.bundles.emplace_back(std::vector<ItemId>{2, 1});
  const auto ul = to_user_list(7, list, v);
  EXPECT_EQ(ul.bundles.front(), (RawItemSet{101, 102}));
  std::vector<data::RawExample> with_oov{{1, {100}, {101, 555}}, {2, {100}, {101}}};
  EXPECT_EQ(bundle_pool(with_oov, v).size(), 1u);
}
