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
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "bundlegen/core/types.hpp"
#include "bundlegen/generate/beam_search.hpp"
#include "bundlegen/generate/config.hpp"
#include "bundlegen/numerics/cholesky.hpp"

namespace bundlegen::generate {

// Jaccard similarity of two bundles, the diversity kernel S.
inline double similarity(const ItemSet& a, const ItemSet& b) { return jaccard(a, b); }

inline double similarity(std::span<const ItemId> a, std::span<const ItemId> b) {
  return jaccard(ItemSet(std::vector<ItemId>(a.begin(), a.end())),
                 ItemSet(std::vector<ItemId>(b.begin(), b.end())));
}

// Raised when fewer than K candidates can be selected. Carries the partial list.
class ShortListError : public Error {
 public:
  ShortListError(const std::string& what, BundleList partial)
      : Error(ErrorKind::kShortList, what), partial_(std::move(partial)) {}
  const BundleList& partial() const { return partial_; }

 private:
  BundleList partial_;
};

struct DppStep {
  std::size_t chosen = 0;        // index into the candidate set
  double score = 0.0;            // log p + λ log det
  double log_det = 0.0;          // log det S over the selection after this step
  std::size_t singular_skipped = 0;
};

struct DppTrace {
  std::vector<DppStep> steps;
};

// Greedy selection of K candidates maximizing
//   log p(b) + λ log det S_{y ∪ {b}}
// one at a time. The log-determinant is extended incrementally through a
// Cholesky factor. A candidate whose Schur complement is at or below the
// jitter makes S singular; it scores -inf and is skipped.
inline BundleList dpp_select(const CandidateSet& cands, const GenerationConfig& cfg,
                             DppTrace* trace = nullptr) {
  cfg.validate();
  const std::size_t k = cfg.list_size;
  BundleList out;
  auto take = [&](std::size_t i) {
    out.bundles.emplace_back(cands[i].items);
    out.scores.push_back(cands[i].log_prob);
  };
  if (cfg.lambda == 0.0) {
    // The candidate set is already in tie-break order.
    for (std::size_t i = 0; i < std::min(k, cands.size()); ++i) {
      take(i);
      if (trace) trace->steps.push_back({i, cands[i].log_prob, 0.0, 0});
    }
    if (out.size() < k) {
      throw ShortListError("only " + std::to_string(cands.size()) + " candidates for K=" +
                               std::to_string(k),
                           std::move(out));
    }
    return out;
  }

  std::vector<ItemSet> sets;
  sets.reserve(cands.size());
  for (const Candidate& c : cands) sets.emplace_back(c.items);
  std::vector<bool> used(cands.size(), false);
  std::vector<std::size_t> chosen;
  numerics::CholeskyState chol;
  std::vector<double> row;

  while (out.size() < k) {
    std::optional<std::size_t> best;
    double best_score = -std::numeric_limits<double>::infinity();
    std::size_t skipped = 0;
    for (std::size_t i = 0; i < cands.size(); ++i) {
      if (used[i]) continue;
      row.resize(chosen.size());
      for (std::size_t s = 0; s < chosen.size(); ++s) row[s] = similarity(sets[i], sets[chosen[s]]);
      const double schur = chol.schur_complement(row, 1.0);
      if (schur <= cfg.jitter) {
        ++skipped;
        continue;
      }
      const double score =
          cands[i].log_prob + cfg.lambda * (chol.log_det() + std::log(schur));
      // Candidates are scanned in tie-break order, so strict > keeps the
      // higher log_prob and then the lexicographically smaller set.
      if (!best || score > best_score) {
        best = i;
        best_score = score;
      }
    }
    if (!best) {
      std::string what = "only " + std::to_string(out.size()) +
                         " selectable candidates for K=" + std::to_string(k);
      throw ShortListError(what, std::move(out));
    }
    row.resize(chosen.size());
    for (std::size_t s = 0; s < chosen.size(); ++s) row[s] = similarity(sets[*best], sets[chosen[s]]);
    const auto ext = chol.extend(row, 1.0, cfg.jitter);
    used[*best] = true;
    chosen.push_back(*best);
    take(*best);
    if (trace) trace->steps.push_back({*best, best_score, ext.log_det, skipped});
  }
  return out;
}

}  // namespace bundlegen::generate
