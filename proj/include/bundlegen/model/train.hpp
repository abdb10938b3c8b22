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

#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <numeric>
#include <random>
#include <span>
#include <vector>

#include "bundlegen/model/losses.hpp"
#include "bundlegen/model/quality_model.hpp"
#include "bundlegen/numerics/adam.hpp"

namespace bundlegen::model {

struct EpochStats {
  int epoch = 0;
  double train_loss = 0.0;  // mean sampled loss over the epoch's batches
  double valid_loss = 0.0;  // full-softmax loss without the l2 term
};

// Everything needed to continue an interrupted run.
struct TrainState {
  numerics::Adam adam;
  int epochs_done = 0;
  std::vector<EpochStats> curve;
  double best_valid = std::numeric_limits<double>::infinity();
  int bad_epochs = 0;
  bool stopped = false;
};

using EpochCallback = std::function<void(const EpochStats&)>;

// Adam on the sampled loss with seeded shuffling. Stops after `patience`
// epochs without validation improvement and restores the best parameters.
inline const TrainState& train(QualityModel& m, std::span<const TrainingExample> train_set,
                               std::span<const TrainingExample> valid_set, TrainState& state,
                               const EpochCallback& on_epoch = {}) {
  const ModelConfig& cfg = m.config();
  if (train_set.empty()) throw Error(ErrorKind::kEmptyCorpus, "no training examples");
  if (state.adam.steps() == 0) {
    numerics::AdamConfig ac;
    ac.learning_rate = cfg.learning_rate;
    state.adam = numerics::Adam(ac);
  }
  auto params = m.parameters();
  auto snapshot = [&] {
    std::vector<Tensor> s;
    for (Parameter* p : params) s.push_back(p->value);
    return s;
  };
  std::vector<Tensor> best = snapshot();
  const auto& eval_set = valid_set.empty() ? train_set : valid_set;

  std::vector<std::size_t> order(train_set.size());
  std::vector<TrainingExample> batch;
  while (!state.stopped && state.epochs_done < cfg.max_epochs) {
    const int epoch = state.epochs_done + 1;
    std::iota(order.begin(), order.end(), 0);
    std::mt19937_64 rng(cfg.seed * 1000003ULL + static_cast<std::uint64_t>(epoch));
    std::shuffle(order.begin(), order.end(), rng);
    double total = 0.0;
    std::size_t n_batches = 0;
    for (std::size_t start = 0; start < order.size(); start += cfg.batch_size) {
      batch.clear();
      const std::size_t stop = std::min(order.size(), start + cfg.batch_size);
      for (std::size_t i = start; i < stop; ++i) batch.push_back(train_set[order[i]]);
      m.zero_grad();
      const double loss = sampled_fa_loss(m, batch, cfg.n_neg_samples, rng(), true);
      if (!std::isfinite(loss)) {
        throw Error(ErrorKind::kDivergence,
                    "loss became non-finite in epoch " + std::to_string(epoch));
      }
      state.adam.step(params);
      total += loss;
      ++n_batches;
    }
    EpochStats st;
    st.epoch = epoch;
    st.train_loss = total / static_cast<double>(n_batches);
    st.valid_loss = mle_loss(static_cast<const QualityModel&>(m), eval_set);
    state.curve.push_back(st);
    state.epochs_done = epoch;
    if (on_epoch) on_epoch(st);
    if (st.valid_loss < state.best_valid) {
      state.best_valid = st.valid_loss;
      state.bad_epochs = 0;
      best = snapshot();
    } else if (++state.bad_epochs >= cfg.patience) {
      state.stopped = true;
    }
  }
  for (std::size_t k = 0; k < params.size(); ++k) params[k]->value = best[k];
  return state;
}

}  // namespace bundlegen::model
