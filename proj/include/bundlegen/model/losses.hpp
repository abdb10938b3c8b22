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
#include <optional>
#include <random>
#include <span>
#include <unordered_set>
#include <vector>

#include "bundlegen/core/types.hpp"
#include "bundlegen/data/corpus.hpp"
#include "bundlegen/model/quality_model.hpp"
#include "bundlegen/numerics/softmax.hpp"

namespace bundlegen::model {

struct TrainingExample {
  UserContext context;
  Bundle target;
};

// Maps a raw example into tokens. Context items outside the vocabulary become
// UNK; target items outside it are dropped, and an empty target yields nullopt.
inline std::optional<TrainingExample> to_training_example(const data::RawExample& raw,
                                                          const Vocabulary& vocab) {
  TrainingExample ex;
  ex.context.user = raw.user;
  for (RawId id : raw.context) ex.context.history.push_back(vocab.token_for(id));
  std::vector<ItemId> target;
  for (RawId id : raw.target) {
    if (auto tok = vocab.find(id)) {
      if (std::find(target.begin(), target.end(), *tok) == target.end()) {
        target.push_back(*tok);
      }
    }
  }
  if (ex.context.history.empty() || target.empty()) return std::nullopt;
  ex.target = canonicalize_bundle(target, vocab);
  return ex;
}

inline std::vector<TrainingExample> to_training_examples(
    std::span<const data::RawExample> raw, const Vocabulary& vocab) {
  std::vector<TrainingExample> out;
  for (const auto& r : raw) {
    if (auto ex = to_training_example(r, vocab)) out.push_back(std::move(*ex));
  }
  return out;
}

// -log σ(h·(e_pos - e_neg)), evaluated stably.
inline double bpr_step_loss(std::span<const double> h, std::span<const double> e_pos,
                            std::span<const double> e_neg) {
  double x = 0.0;
  for (std::size_t i = 0; i < h.size(); ++i) x += h[i] * (e_pos[i] - e_neg[i]);
  return x >= 0.0 ? std::log1p(std::exp(-x)) : -x + std::log1p(std::exp(x));
}

// -log softmax(h, E)_positive
inline double sampled_softmax_nll(std::span<const double> h, const Tensor& candidates,
                                  std::size_t positive) {
  const auto z = numerics::logits_against(h, candidates);
  return numerics::log_sum_exp(z) - z[positive];
}

namespace detail {

// Teacher forcing over BOS, i_1..i_T with targets i_1..i_T, END. Calls
// fn(step, hidden, target_token) once per step (T + 1 calls).
template <class Model, class Fn>
void teacher_force(Model& m, Tape& t, std::span<const ItemId> context,
                   std::span<const ItemId> bundle, Fn&& fn) {
  const Vocabulary& v = m.vocab();
  const Encoded enc = m.encode(t, context);
  DecoderState state = m.initial_state(t, enc, 1);
  ItemId prev = v.bos();
  for (std::size_t step = 0; step <= bundle.size(); ++step) {
    const ItemId one[] = {prev};
    StepOutput out = m.decoder_step(t, state, one, enc);
    const ItemId target = step < bundle.size() ? bundle[step] : v.end();
    fn(step, out.hidden, target);
    state = std::move(out.state);
    prev = target;
  }
}

inline std::size_t full_index(const Vocabulary& v, ItemId token) {
  if (token == v.end()) return static_cast<std::size_t>(v.size());
  if (!v.is_item(token)) {
    throw Error(ErrorKind::kUnknownItem, "target token " + std::to_string(token));
  }
  return static_cast<std::size_t>(token);
}

inline double add_l2(QualityModel& m, bool with_grad) {
  const double w = m.config().l2_weight;
  if (w == 0.0) return 0.0;
  if (with_grad) {
    for (Parameter* p : m.parameters()) {
      for (std::size_t i = 0; i < p->value.size(); ++i) p->grad[i] += 2.0 * w * p->value[i];
    }
  }
  return w * m.squared_norm();
}

}  // namespace detail

// log p(b | C_u) = Σ_t log softmax(h_t, E)_{i_t} + log softmax(h_{T+1}, E)_END,
// teacher-forced on b in the given order over the full candidate set.
inline double bundle_log_prob(const QualityModel& m, std::span<const ItemId> bundle,
                              std::span<const ItemId> context, const Tensor& weights) {
  Tape t(false);
  double lp = 0.0;
  detail::teacher_force(m, t, context, bundle, [&](std::size_t, Var h, ItemId target) {
    lp -= sampled_softmax_nll(h.value().row_span(0), weights,
                              detail::full_index(m.vocab(), target));
  });
  return lp;
}

inline double bundle_log_prob(const QualityModel& m, std::span<const ItemId> bundle,
                              std::span<const ItemId> context) {
  return bundle_log_prob(m, bundle, context, m.full_weight_matrix());
}

// Negative mean per-step cross-entropy, log p(b|C_u) / (T + 1).
inline double rank_score(const QualityModel& m, std::span<const ItemId> bundle,
                         std::span<const ItemId> context, const Tensor& weights) {
  return bundle_log_prob(m, bundle, context, weights) /
         static_cast<double>(bundle.size() + 1);
}

inline double rank_score(const QualityModel& m, std::span<const ItemId> bundle,
                         std::span<const ItemId> context) {
  return rank_score(m, bundle, context, m.full_weight_matrix());
}

// Mean over examples of -(1/(T+1)) Σ_t log p(i_t | ·) with the full softmax,
// plus l2_weight·|θ|^2 when include_l2 is set. With `with_grad` the gradient
// is added into every parameter's grad.
inline double mle_loss(QualityModel& m, std::span<const TrainingExample> batch,
                       bool with_grad, bool include_l2 = true) {
  if (batch.empty()) throw Error(ErrorKind::kInvalidArgument, "empty batch");
  Tape t(with_grad);
  const auto cand = m.full_candidates();
  const Var e = m.weight_matrix(t, cand);
  std::vector<Var> per_example;
  for (const TrainingExample& ex : batch) {
    std::vector<Var> steps;
    detail::teacher_force(m, t, ex.context.history, ex.target.items(),
                          [&](std::size_t, Var h, ItemId target) {
                            steps.push_back(t.cross_entropy(
                                t.matmul_nt(h, e), detail::full_index(m.vocab(), target)));
                          });
    per_example.push_back(t.scale(t.sum_scalars(steps), 1.0 / static_cast<double>(steps.size())));
  }
  const Var loss =
      t.scale(t.sum_scalars(per_example), 1.0 / static_cast<double>(per_example.size()));
  if (with_grad) t.backward(loss);
  double value = loss.scalar();
  if (include_l2) value += detail::add_l2(m, with_grad);
  return value;
}

// Evaluation-only variant on a frozen model.
inline double mle_loss(const QualityModel& m, std::span<const TrainingExample> batch) {
  if (batch.empty()) throw Error(ErrorKind::kInvalidArgument, "empty batch");
  const Tensor e = m.full_weight_matrix();
  double total = 0.0;
  for (const TrainingExample& ex : batch) {
    const double lp = bundle_log_prob(m, ex.target.items(), ex.context.history, e);
    total += -lp / static_cast<double>(ex.target.size() + 1);
  }
  return total / static_cast<double>(batch.size());
}

// Candidates drawn for one decoding step; index 0 is the positive.
struct SampledStep {
  std::vector<double> hidden;
  std::vector<ItemId> candidates;
};

struct SampleTrace {
  std::vector<std::vector<SampledStep>> examples;
};

// Uniform negatives without replacement, excluding the positive. With
// always_include_end, END is appended whenever it is not the positive and the
// negatives are drawn from items only.
inline std::vector<ItemId> draw_candidates(const QualityModel& m, ItemId positive,
                                          int n_neg, std::mt19937_64& rng) {
  const Vocabulary& v = m.vocab();
  const bool force_end = m.config().always_include_end;
  std::vector<ItemId> pool_tail;  // tokens beyond [0, N) eligible for sampling
  if (!force_end && positive != v.end()) pool_tail.push_back(v.end());
  const std::int64_t n_items = v.size();
  const bool pos_is_item = v.is_item(positive);
  const std::int64_t pool = n_items - (pos_is_item ? 1 : 0) +
                            static_cast<std::int64_t>(pool_tail.size());
  auto token_at = [&](std::int64_t k) -> ItemId {
    if (k < n_items - (pos_is_item ? 1 : 0)) {
      return static_cast<ItemId>(pos_is_item && k >= positive ? k + 1 : k);
    }
    return pool_tail[static_cast<std::size_t>(k - (n_items - (pos_is_item ? 1 : 0)))];
  };
  const std::int64_t draw = std::min<std::int64_t>(n_neg, pool);
  // Floyd's algorithm keeps the draw O(n_neg).
  std::vector<std::int64_t> picked;
  std::unordered_set<std::int64_t> seen;
  for (std::int64_t j = pool - draw; j < pool; ++j) {
    const std::int64_t r = std::uniform_int_distribution<std::int64_t>(0, j)(rng);
    const std::int64_t k = seen.count(r) ? j : r;
    seen.insert(k);
    picked.push_back(k);
  }
  std::vector<ItemId> out{positive};
  for (std::int64_t k : picked) out.push_back(token_at(k));
  if (force_end && positive != v.end()) out.push_back(v.end());
  return out;
}

// Sampled softmax loss: at each step the softmax runs over the positive plus
// n_neg uniform negatives (and END, see draw_candidates). With one negative
// and no forced END each step reduces to -log σ(h·(e_pos - e_neg)). When
// n_neg covers all remaining items the full loss is returned.
inline double sampled_fa_loss(QualityModel& m, std::span<const TrainingExample> batch,
                              int n_neg, std::uint64_t seed, bool with_grad,
                              SampleTrace* trace = nullptr) {
  if (n_neg < 1) throw Error(ErrorKind::kInvalidArgument, "n_neg must be >= 1");
  if (batch.empty()) throw Error(ErrorKind::kInvalidArgument, "empty batch");
  if (n_neg >= m.vocab().size() - 1) return mle_loss(m, batch, with_grad);
  std::mt19937_64 rng(seed);
  Tape t(with_grad);
  std::vector<Var> per_example;
  if (trace) trace->examples.clear();
  for (const TrainingExample& ex : batch) {
    std::vector<Var> steps;
    std::vector<SampledStep> ex_trace;
    detail::teacher_force(m, t, ex.context.history, ex.target.items(),
                          [&](std::size_t, Var h, ItemId target) {
                            auto cand = draw_candidates(m, target, n_neg, rng);
                            const Var e = m.weight_matrix(t, cand);
                            steps.push_back(t.cross_entropy(t.matmul_nt(h, e), 0));
                            if (trace) {
                              const auto row = h.value().row_span(0);
                              ex_trace.push_back(SampledStep{{row.begin(), row.end()},
                                                             std::move(cand)});
                            }
                          });
    if (trace) trace->examples.push_back(std::move(ex_trace));
    per_example.push_back(t.scale(t.sum_scalars(steps), 1.0 / static_cast<double>(steps.size())));
  }
  const Var loss =
      t.scale(t.sum_scalars(per_example), 1.0 / static_cast<double>(per_example.size()));
  if (with_grad) t.backward(loss);
  return loss.scalar() + detail::add_l2(m, with_grad);
}

}  // namespace bundlegen::model
