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
#include <filesystem>
#include <fstream>
#include <functional>
#include <random>
#include <set>
#include <sstream>
#include <vector>

#include <gtest/gtest.h>

#include "bundlegen/data/synthetic.hpp"
#include "bundlegen/model/checkpoint.hpp"
#include "bundlegen/model/losses.hpp"
#include "bundlegen/model/quality_model.hpp"
#include "bundlegen/model/train.hpp"
#include "bundlegen/numerics/grad_check.hpp"
#include "oracles.hpp"
#include "support.hpp"

using namespace bundlegen;
using namespace bundlegen::model;
using numerics::Tape;
using numerics::Tensor;
using testing_support::small_vocab;
using testing_support::tiny_config;

namespace {

std::vector<TrainingExample> tiny_batch(const Vocabulary& v, std::uint64_t seed, int n = 2) {
  std::mt19937_64 rng(seed);
  std::vector<TrainingExample> out;
  for (int i = 0; i < n; ++i) {
    TrainingExample ex;
    ex.context.history = testing_support::random_context(rng, v.size(), 3 + i);
    std::vector<ItemId> items{static_cast<ItemId>(i % v.size()),
                              static_cast<ItemId>((i + 2) % v.size())};
    ex.target = canonicalize_bundle(items, v);
    out.push_back(std::move(ex));
  }
  return out;
}

// log p(next | prefix) over items and END straight from the decoder, with no
// masking. Tokens index the full candidate list.
std::vector<double> next_log_probs(const QualityModel& m, std::span<const ItemId> context,
                                   std::span<const ItemId> prefix) {
  Tape t(false);
  const Encoded enc = m.encode(t, context);
  DecoderState s = m.initial_state(t, enc, 1);
  ItemId prev = m.vocab().bos();
  StepOutput out;
  for (std::size_t i = 0; i <= prefix.size(); ++i) {
    const ItemId one[] = {prev};
    out = m.decoder_step(t, s, one, enc);
    s = out.state;
    if (i < prefix.size()) prev = prefix[i];
  }
  const Tensor e = m.full_weight_matrix();
  std::vector<double> z(e.rows(), 0.0);
  for (std::size_t j = 0; j < e.rows(); ++j) {
    for (std::size_t d = 0; d < e.cols(); ++d) z[j] += out.hidden.value()(0, d) * e(j, d);
  }
  auto p = oracle::direct_softmax(z, std::vector<bool>(z.size(), true));
  for (double& v : p) v = std::log(v);
  return p;
}

double oracle_bundle_log_prob(const QualityModel& m, std::span<const ItemId> context,
                              std::span<const ItemId> seq) {
  double lp = 0.0;
  for (std::size_t i = 0; i < seq.size(); ++i) {
    lp += next_log_probs(m, context, seq.first(i))[seq[i]];
  }
  return lp + next_log_probs(m, context, seq)[m.end_index()];
}

std::string slurp(const std::string& path) {
  std::ifstream in(path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

TEST(Embed, ShapeAndZeroRows) {
  std::vector<Item> items{{0, 1, 4, 2.0}, {0, 2, std::nullopt, 3.0}};
  const Vocabulary v(items);
  const QualityModel m(tiny_config(), v);
  Tape t(false);
  const ItemId toks[] = {0, 1, v.pad(), v.unk(), v.end()};
  const Tensor x = m.embed(t, toks).value();
  const std::size_t dx = 4 + 2 + 1;
  ASSERT_EQ(x.cols(), dx);
  ASSERT_EQ(x.rows(), 5u);
  for (std::size_t c = 4; c < 6; ++c) EXPECT_EQ(x(1, c), 0.0);  // no category
  EXPECT_NE(x(0, 4), 0.0);
  for (std::size_t c = 0; c < dx; ++c) {
    EXPECT_EQ(x(2, c), 0.0);
    EXPECT_EQ(x(3, c), 0.0);
  }
  EXPECT_NE(x(4, 0), 0.0);  // END has a learned embedding
  const ItemId bad[] = {v.token_count()};
  try {
    m.embed(t, bad);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::kUnknownItem);
  }
}

TEST(Encode, EmptyContextIsAnError) {
  const QualityModel m(tiny_config(), small_vocab(5));
  Tape t(false);
  try {
    m.encode(t, std::span<const ItemId>{});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::kEmptyContext);
  }
}

TEST(Encode, WideWindowsSkippedOnShortHistory) {
  auto cfg = tiny_config();
  cfg.cnn_window_sizes = {1, 4};
  const QualityModel m(cfg, small_vocab(5));
  Tape t(false);
  const ItemId ctx[] = {1, 2};
  const Encoded e = m.encode(t, ctx);
  EXPECT_EQ(e.length, 2u);
  ASSERT_EQ(e.memory.value().cols(), 4u);
  for (std::size_t r = 0; r < 2; ++r) {
    EXPECT_EQ(e.memory.value()(r, 2), 0.0);
    EXPECT_EQ(e.memory.value()(r, 3), 0.0);
  }
}

TEST(Encode, MaxPoolIgnoresPositionForUnitWindows) {
  auto cfg = tiny_config();
  cfg.cnn_window_sizes = {1};
  const QualityModel m(cfg, small_vocab(6));
  auto h0 = [&](std::vector<ItemId> ctx) {
    Tape t(false);
    return m.encode(t, ctx).h0.value();
  };
  EXPECT_EQ(h0({1, 3, 4}), h0({4, 1, 3}));

  auto cfg2 = tiny_config();
  cfg2.cnn_window_sizes = {2};
  const QualityModel m2(cfg2, small_vocab(6));
  Tape t1(false), t2(false);
  const std::vector<ItemId> a{1, 3, 4}, b{3, 1, 4};
  EXPECT_NE(m2.encode(t1, a).h0.value(), m2.encode(t2, b).h0.value());
}

TEST(Encode, TruncatesToRecentItems) {
  auto cfg = tiny_config();
  cfg.max_context = 3;
  const QualityModel m(cfg, small_vocab(6));
  Tape t1(false), t2(false);
  const std::vector<ItemId> longer{5, 5, 0, 1, 2}, recent{0, 1, 2};
  EXPECT_EQ(m.encode(t1, longer).h0.value(), m.encode(t2, recent).h0.value());
}

TEST(DecoderStep, ZeroParametersGiveZeroHidden) {
  QualityModel m(tiny_config(), small_vocab(5));
  for (auto* p : m.parameters()) p->value.fill(0.0);
  Tape t(false);
  const ItemId ctx[] = {0, 1};
  const Encoded enc = m.encode(t, ctx);
  const auto s = m.initial_state(t, enc, 1);
  const ItemId prev[] = {m.vocab().bos()};
  const auto out = m.decoder_step(t, s, prev, enc);
  for (double v : out.hidden.value().values()) EXPECT_EQ(v, 0.0);
}

TEST(DecoderStep, IdentitySecondLayerMatchesOneLayer) {
  auto cfg2 = tiny_config(9);
  auto cfg1 = cfg2;
  cfg1.decoder_layers = 1;
  const Vocabulary v = small_vocab(6);
  QualityModel two(cfg2, v);
  QualityModel one(cfg1, v);
  // Zero weights and bias make the second cell output exactly zero, so the
  // residual connection passes the first layer through unchanged.
  two.find_parameter("lstm1.w")->value.fill(0.0);
  two.find_parameter("lstm1.b")->value.fill(0.0);
  for (auto* p : one.parameters()) p->value = two.find_parameter(p->name)->value;

  const ItemId ctx[] = {2, 0, 5, 1};
  const ItemId seq[] = {3, 4};
  for (std::size_t k = 0; k <= 2; ++k) {
    const auto a = next_log_probs(one, ctx, std::span<const ItemId>(seq).first(k));
    const auto b = next_log_probs(two, ctx, std::span<const ItemId>(seq).first(k));
    for (std::size_t j = 0; j < a.size(); ++j) EXPECT_NEAR(a[j], b[j], 1e-14);
  }
}

TEST(DecoderStep, Deterministic) {
  const Vocabulary v = small_vocab(6);
  const QualityModel a(tiny_config(4), v), b(tiny_config(4), v);
  const ItemId ctx[] = {2, 0};
  const ItemId seq[] = {3};
  EXPECT_EQ(next_log_probs(a, ctx, seq), next_log_probs(b, ctx, seq));
}

TEST(WeightMatrix, IdenticalFeaturesGiveIdenticalRows) {
  std::vector<Item> items{{0, 1, 0, 5.0}, {0, 2, 0, 5.0}, {0, 3, 1, 8.0}};
  QualityModel m(tiny_config(), Vocabulary(items));
  auto& emb = m.find_parameter("item_emb")->value;
  for (std::size_t c = 0; c < emb.cols(); ++c) emb(1, c) = emb(0, c);
  const Tensor e = m.full_weight_matrix();
  ASSERT_EQ(e.rows(), 4u);  // items + END
  for (std::size_t c = 0; c < e.cols(); ++c) EXPECT_EQ(e(0, c), e(1, c));
  const auto p = next_log_probs(m, std::vector<ItemId>{2}, {});
  EXPECT_EQ(p[0], p[1]);
}

TEST(WeightMatrix, SampledRowsMatchFullRows) {
  const QualityModel m(tiny_config(), small_vocab(7));
  const Tensor full = m.full_weight_matrix();
  Tape t(false);
  const ItemId cand[] = {3, m.vocab().end(), 0};
  const Tensor e = m.weight_matrix(t, cand).value();
  for (std::size_t c = 0; c < e.cols(); ++c) {
    EXPECT_EQ(e(0, c), full(3, c));
    EXPECT_EQ(e(1, c), full(7, c));
    EXPECT_EQ(e(2, c), full(0, c));
  }
}

TEST(BundleLogProb, SingleItemIsTwoSteps) {
  const QualityModel m(tiny_config(), small_vocab(5));
  const ItemId ctx[] = {1, 2};
  const ItemId b[] = {3};
  const double expected = next_log_probs(m, ctx, {})[3] + next_log_probs(m, ctx, b)[5];
  EXPECT_NEAR(bundle_log_prob(m, b, ctx), expected, 1e-12);
}

TEST(BundleLogProb, MatchesOracleAndIsNonPositive) {
  std::mt19937_64 rng(31);
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    const QualityModel m(tiny_config(seed), small_vocab(6, 3, seed));
    const auto ctx = testing_support::random_context(rng, 6, 4);
    const ItemId b[] = {static_cast<ItemId>(seed % 6), static_cast<ItemId>((seed + 1) % 6)};
    const double lp = bundle_log_prob(m, b, ctx);
    EXPECT_LE(lp, 0.0);
    EXPECT_NEAR(lp, oracle_bundle_log_prob(m, ctx, b), 1e-12);
  }
}

TEST(BundleLogProb, MassSumsToOne) {
  const QualityModel m(tiny_config(12), small_vocab(4));
  const ItemId ctx[] = {0, 3};
  const std::size_t limit = 3;
  // Finished sequences of length <= limit plus the mass still running after
  // limit + 1 emissions must account for all probability.
  double finished = 0.0, running = 0.0;
  std::vector<ItemId> seq;
  std::function<void(double)> walk = [&](double lp_prefix) {
    const auto p = next_log_probs(m, ctx, seq);
    finished += std::exp(lp_prefix + p[m.end_index()]);
    for (ItemId j = 0; j < 4; ++j) {
      if (seq.size() == limit) {
        running += std::exp(lp_prefix + p[j]);
        continue;
      }
      seq.push_back(j);
      walk(lp_prefix + p[j]);
      seq.pop_back();
    }
  };
  walk(0.0);
  EXPECT_NEAR(finished + running, 1.0, 1e-12);
  EXPECT_LT(finished, 1.0);
}

TEST(MleLoss, UntrainedNearUniform) {
  auto cfg = tiny_config();
  cfg.init_scale = 1e-3;
  cfg.l2_weight = 0.0;
  QualityModel m(cfg, small_vocab(20));
  const auto batch = tiny_batch(m.vocab(), 4, 4);
  EXPECT_NEAR(mle_loss(m, batch, false), std::log(21.0), 1e-3);
  EXPECT_NEAR(mle_loss(static_cast<const QualityModel&>(m), batch), std::log(21.0), 1e-3);
}

TEST(MleLoss, IncludesL2) {
  auto cfg = tiny_config();
  QualityModel m(cfg, small_vocab(6));
  const auto batch = tiny_batch(m.vocab(), 5);
  const double with = mle_loss(m, batch, false);
  const double without = mle_loss(m, batch, false, false);
  EXPECT_NEAR(with - without, cfg.l2_weight * m.squared_norm(), 1e-12);
  EXPECT_NEAR(without, mle_loss(static_cast<const QualityModel&>(m), batch), 1e-12);
}

TEST(MleLoss, OverfitsOneExample) {
  auto cfg = tiny_config();
  cfg.l2_weight = 0.0;
  QualityModel m(cfg, small_vocab(8));
  const auto batch = tiny_batch(m.vocab(), 6, 1);
  numerics::Adam adam(numerics::AdamConfig{0.05});
  const double first = mle_loss(m, batch, false);
  for (int step = 0; step < 50; ++step) {
    m.zero_grad();
    mle_loss(m, batch, true);
    adam.step(m.parameters());
  }
  EXPECT_LT(mle_loss(m, batch, false), 0.5 * first);
}

class LossGradients : public ::testing::TestWithParam<SoftmaxKind> {};

TEST_P(LossGradients, MleLoss) {
  auto cfg = tiny_config(17);
  cfg.softmax = GetParam();
  QualityModel m(cfg, small_vocab(6));
  const auto batch = tiny_batch(m.vocab(), 8);
  auto loss = [&](bool g) { return mle_loss(m, batch, g); };
  const auto r = numerics::grad_check_detailed(loss, m.parameters());
  EXPECT_LT(r.max_rel_error, 1e-4) << r.worst_param << '[' << r.worst_index << ']';
  EXPECT_GT(r.checked, 100u);
}

TEST_P(LossGradients, SampledLoss) {
  auto cfg = tiny_config(18);
  cfg.softmax = GetParam();
  QualityModel m(cfg, small_vocab(8));
  const auto batch = tiny_batch(m.vocab(), 9);
  auto loss = [&](bool g) { return sampled_fa_loss(m, batch, 3, 77, g); };
  const auto r = numerics::grad_check_detailed(loss, m.parameters());
  EXPECT_LT(r.max_rel_error, 1e-4) << r.worst_param << '[' << r.worst_index << ']';
}

INSTANTIATE_TEST_SUITE_P(Softmax, LossGradients,
                         ::testing::Values(SoftmaxKind::kFeatureAware, SoftmaxKind::kIdOnly));

TEST(SampledLoss, OneNegativeIsBpr) {
  auto cfg = tiny_config(21);
  cfg.always_include_end = false;
  QualityModel m(cfg, small_vocab(9));
  const auto batch = tiny_batch(m.vocab(), 10, 3);
  SampleTrace trace;
  const double loss = sampled_fa_loss(m, batch, 1, 5, false, &trace);
  const QualityModel& frozen = m;
  double expected = 0.0;
  for (const auto& steps : trace.examples) {
    double ex = 0.0;
    for (const auto& s : steps) {
      ASSERT_EQ(s.candidates.size(), 2u);
      EXPECT_NE(s.candidates[0], s.candidates[1]);
      Tape t(false);
      const Tensor e = frozen.weight_matrix(t, s.candidates).value();
      const auto pos = e.row_span(0), neg = e.row_span(1);
      ex += oracle::bpr(s.hidden, {pos.begin(), pos.end()}, {neg.begin(), neg.end()});
    }
    expected += ex / static_cast<double>(steps.size());
  }
  expected = expected / static_cast<double>(trace.examples.size()) +
             cfg.l2_weight * m.squared_norm();
  EXPECT_NEAR(loss, expected, 1e-10 * std::abs(expected));
}

TEST(SampledLoss, AllNegativesIsFullLoss) {
  QualityModel m(tiny_config(), small_vocab(6));
  const auto batch = tiny_batch(m.vocab(), 11);
  EXPECT_EQ(sampled_fa_loss(m, batch, 5, 1, false), mle_loss(m, batch, false));
}

TEST(SampledLoss, CandidatesAreDistinctAndIncludeEnd) {
  const QualityModel m(tiny_config(), small_vocab(30));
  std::mt19937_64 rng(3);
  for (ItemId pos : {ItemId{0}, ItemId{17}, ItemId{29}, m.vocab().end()}) {
    const auto c = draw_candidates(m, pos, 10, rng);
    EXPECT_EQ(c[0], pos);
    EXPECT_EQ(std::set<ItemId>(c.begin(), c.end()).size(), c.size());
    EXPECT_TRUE(std::find(c.begin(), c.end(), m.vocab().end()) != c.end());
    EXPECT_EQ(c.size(), pos == m.vocab().end() ? 11u : 12u);
  }
}

TEST(SampledLoss, VarianceShrinksWithMoreNegatives) {
  QualityModel m(tiny_config(23), small_vocab(40));
  const auto batch = tiny_batch(m.vocab(), 12, 2);
  auto variance = [&](int n_neg) {
    double s = 0.0, s2 = 0.0;
    const int runs = 60;
    for (int r = 0; r < runs; ++r) {
      const double v = sampled_fa_loss(m, batch, n_neg, 1000 + r, false);
      s += v;
      s2 += v * v;
    }
    return s2 / runs - (s / runs) * (s / runs);
  };
  EXPECT_LT(variance(30), variance(2));
}

TEST(SampledLoss, RejectsZeroNegatives) {
  QualityModel m(tiny_config(), small_vocab(6));
  EXPECT_THROW(sampled_fa_loss(m, tiny_batch(m.vocab(), 1), 0, 1, false), Error);
}

TEST(RankScore, NormalizedLogProb) {
  const QualityModel m(tiny_config(), small_vocab(6));
  const ItemId ctx[] = {1, 4};
  const ItemId b[] = {2, 0};
  EXPECT_DOUBLE_EQ(rank_score(m, b, ctx), bundle_log_prob(m, b, ctx) / 3.0);
  EXPECT_EQ(rank_score(m, b, ctx), rank_score(m, b, ctx));
}

namespace {

struct TinyCorpus {
  std::vector<TrainingExample> train, valid;
  Vocabulary vocab;
};

TinyCorpus synthetic_examples(int users, int items, int patterns) {
  data::SyntheticOptions o;
  o.n_users = users;
  o.n_items = items;
  o.n_patterns = patterns;
  o.n_categories = 5;
  const auto corpus = data::make_synthetic_corpus(o);
  const auto cat = data::catalog_from_events(corpus.events);
  const auto split =
      data::make_split(data::group_bundles(corpus.events, cat), cat, data::CorpusKind::kCoPurchase, 1);
  return {to_training_examples(split.train, split.vocab),
          to_training_examples(split.valid, split.vocab), split.vocab};
}

ModelConfig desk_config() {
  ModelConfig c;
  c.embed_dim = 8;
  c.cate_dim = 4;
  c.hidden_dim = 16;
  c.cnn_window_sizes = {1, 2};
  c.cnn_channels_per_window = 4;
  c.n_neg_samples = 8;
  c.max_epochs = 4;
  c.learning_rate = 1e-2;
  return c;
}

}  // namespace

TEST(Train, BeatsUniformAndIsDeterministic) {
  const auto data = synthetic_examples(150, 60, 8);
  QualityModel a(desk_config(), data.vocab), b(desk_config(), data.vocab);
  TrainState sa, sb;
  train(a, data.train, data.valid, sa);
  train(b, data.train, data.valid, sb);
  ASSERT_EQ(sa.curve.size(), sb.curve.size());
  for (std::size_t i = 0; i < sa.curve.size(); ++i) {
    EXPECT_EQ(sa.curve[i].train_loss, sb.curve[i].train_loss);
    EXPECT_EQ(sa.curve[i].valid_loss, sb.curve[i].valid_loss);
  }
  const double uniform = std::log(static_cast<double>(data.vocab.size()) + 1.0);
  EXPECT_LT(sa.best_valid, uniform);
  EXPECT_NEAR(mle_loss(static_cast<const QualityModel&>(a), data.valid), sa.best_valid, 1e-12);
}

TEST(Train, ZeroLearningRateKeepsParameters) {
  const auto data = synthetic_examples(40, 30, 4);
  auto cfg = desk_config();
  cfg.learning_rate = 0.0;
  cfg.max_epochs = 1;
  QualityModel m(cfg, data.vocab);
  const auto before = m.parameter_values();
  TrainState s;
  train(m, data.train, data.valid, s);
  for (std::size_t k = 0; k < before.size(); ++k) {
    EXPECT_EQ(before[k].value, m.parameter_values()[k].value) << before[k].name;
  }
}

TEST(Train, EarlyStopRestoresBest) {
  const auto data = synthetic_examples(60, 30, 4);
  auto cfg = desk_config();
  cfg.learning_rate = 0.3;  // noisy enough to plateau
  cfg.max_epochs = 12;
  cfg.patience = 1;
  QualityModel m(cfg, data.vocab);
  TrainState s;
  train(m, data.train, data.valid, s);
  double best = std::numeric_limits<double>::infinity();
  for (const auto& e : s.curve) best = std::min(best, e.valid_loss);
  EXPECT_EQ(best, s.best_valid);
  EXPECT_NEAR(mle_loss(static_cast<const QualityModel&>(m), data.valid), best, 1e-12);
  if (s.stopped) {
    EXPECT_LT(s.curve.size(), 12u);
  }
}

TEST(Train, RankScorePrefersTrainedTarget) {
  auto cfg = tiny_config(2);
  cfg.l2_weight = 0.0;
  cfg.learning_rate = 0.05;
  cfg.n_neg_samples = 2;
  cfg.max_epochs = 60;
  cfg.patience = 60;
  cfg.batch_size = 1;
  QualityModel m(cfg, small_vocab(8));
  auto ex = tiny_batch(m.vocab(), 3, 1);
  TrainState s;
  train(m, ex, ex, s);
  const auto& ctx = ex[0].context.history;
  const auto target = ex[0].target.items();
  const double score = rank_score(m, target, ctx);
  for (ItemId swap = 0; swap < 8; ++swap) {
    if (std::find(target.begin(), target.end(), swap) != target.end()) continue;
    auto corrupted = target;
    corrupted.back() = swap;
    EXPECT_GT(score, rank_score(m, corrupted, ctx));
  }
}

TEST(Checkpoint, RoundTripIsExact) {
  const auto data = synthetic_examples(50, 30, 4);
  auto cfg = desk_config();
  cfg.max_epochs = 1;
  QualityModel m(cfg, data.vocab);
  TrainState s;
  train(m, data.train, data.valid, s);
  const auto dir = std::filesystem::temp_directory_path();
  const std::string a = (dir / "bundlegen_ckpt_a.json").string();
  const std::string b = (dir / "bundlegen_ckpt_b.json").string();
  save_checkpoint(a, m, &s);
  const Checkpoint loaded = load_checkpoint(a);
  for (std::size_t k = 0; k < m.parameter_values().size(); ++k) {
    EXPECT_EQ(loaded.model.parameter_values()[k].value, m.parameter_values()[k].value);
  }
  EXPECT_EQ(loaded.state.epochs_done, 1);
  EXPECT_EQ(loaded.state.adam.steps(), s.adam.steps());
  save_checkpoint(b, loaded.model, &loaded.state);
  EXPECT_EQ(slurp(a), slurp(b));
  std::filesystem::remove(a);
  std::filesystem::remove(b);
}

TEST(Checkpoint, RejectsOtherVocabulary) {
  const QualityModel m(tiny_config(), small_vocab(6));
  EXPECT_NO_THROW(require_same_vocab(m, small_vocab(6)));
  try {
    require_same_vocab(m, small_vocab(7));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::kIncompatibleArtifact);
  }
  auto j = checkpoint_to_json(m);
  j["vocab_hash"] = "0000000000000000";
  EXPECT_THROW(checkpoint_from_json(j), Error);
  auto k = checkpoint_to_json(m);
  k["params"][0]["rows"] = 1;
  EXPECT_THROW(checkpoint_from_json(k), Error);
}

TEST(Checkpoint, ResumeContinuesTraining) {
  const auto data = synthetic_examples(80, 40, 6);
  auto cfg = desk_config();
  cfg.max_epochs = 3;
  cfg.learning_rate = 3e-3;
  QualityModel straight(cfg, data.vocab);
  TrainState ss;
  train(straight, data.train, data.valid, ss);

  auto short_cfg = cfg;
  short_cfg.max_epochs = 1;
  QualityModel first(short_cfg, data.vocab);
  TrainState fs;
  train(first, data.train, data.valid, fs);
  Checkpoint ck = checkpoint_from_json(checkpoint_to_json(first, &fs));
  // Raise the epoch budget on the restored model and continue.
  auto j = checkpoint_to_json(ck.model, &ck.state);
  j["config"]["max_epochs"] = 3;
  Checkpoint resumed = checkpoint_from_json(j);
  train(resumed.model, data.train, data.valid, resumed.state);

  // Equal while every epoch improves validation, which holds early on.
  bool improving = true;
  for (std::size_t i = 1; i < ss.curve.size(); ++i) {
    improving = improving && ss.curve[i].valid_loss < ss.curve[i - 1].valid_loss;
  }
  ASSERT_TRUE(improving) << ss.curve[0].valid_loss << ' ' << ss.curve[1].valid_loss << ' '
                         << ss.curve[2].valid_loss;
  ASSERT_EQ(resumed.state.curve.size(), ss.curve.size());
  for (std::size_t i = 0; i < ss.curve.size(); ++i) {
    EXPECT_EQ(resumed.state.curve[i].valid_loss, ss.curve[i].valid_loss);
  }
}
