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
#include <map>
#include <span>
#include <vector>

#include "bundlegen/core/types.hpp"
#include "bundlegen/generate/config.hpp"
#include "bundlegen/model/quality_model.hpp"
#include "bundlegen/numerics/softmax.hpp"

namespace bundlegen::generate {

using model::DecoderState;
using model::Encoded;
using model::QualityModel;
using numerics::Tape;
using numerics::Tensor;

// A frozen model plus its output weight matrix over every item and END,
// built once and shared by all inference calls.
class InferenceModel {
 public:
  explicit InferenceModel(const QualityModel& m)
      : model_(&m), weights_(m.full_weight_matrix()) {}

  const QualityModel& model() const { return *model_; }
  const Vocabulary& vocab() const { return model_->vocab(); }
  const Tensor& weights() const { return weights_; }
  std::size_t n_items() const { return static_cast<std::size_t>(vocab().size()); }

  // Logits of every item and END given the decoder output row.
  std::vector<double> logits(const Tensor& hidden) const {
    return numerics::logits_against(hidden.row_span(0), weights_);
  }

 private:
  const QualityModel* model_;
  Tensor weights_;
};

struct BeamEntry {
  std::vector<ItemId> prefix;  // no END
  double log_prob = 0.0;
  bool finished = false;
};

struct Candidate {
  std::vector<ItemId> items;  // decoding order
  double log_prob = 0.0;
};

// Orders by log_prob descending, then by sorted item ids.
inline bool candidate_before(const Candidate& a, const Candidate& b) {
  if (a.log_prob != b.log_prob) return a.log_prob > b.log_prob;
  return ItemSet(a.items) < ItemSet(b.items);
}

// Set-distinct candidates sorted by candidate_before.
class CandidateSet {
 public:
  CandidateSet() = default;

  // Keeps, for every distinct item set, the highest-scoring member.
  static CandidateSet from(std::vector<Candidate> raw) {
    std::map<ItemSet, Candidate> best;
    for (Candidate& c : raw) {
      ItemSet key(c.items);
      if (key.size() != c.items.size() || c.items.empty()) {
        throw Error(ErrorKind::kDegenerateInput, "candidate must be non-empty and duplicate-free");
      }
      auto it = best.find(key);
      if (it == best.end()) {
        best.emplace(std::move(key), std::move(c));
      } else if (c.log_prob > it->second.log_prob) {
        it->second = std::move(c);
      }
    }
    CandidateSet s;
    for (auto& [key, c] : best) s.items_.push_back(std::move(c));
    std::sort(s.items_.begin(), s.items_.end(), candidate_before);
    return s;
  }

  std::size_t size() const { return items_.size(); }
  bool empty() const { return items_.empty(); }
  const Candidate& operator[](std::size_t i) const { return items_[i]; }
  const std::vector<Candidate>& items() const { return items_; }
  auto begin() const { return items_.begin(); }
  auto end() const { return items_.end(); }

 private:
  std::vector<Candidate> items_;
};

// Kept beam entries after every step, for inspection.
struct BeamTrace {
  std::vector<std::vector<BeamEntry>> steps;
};

namespace detail {

struct OpenBeam {
  BeamEntry entry;
  DecoderState state;  // before consuming `last`
  ItemId last = 0;
};

inline bool entry_before(const BeamEntry& a, const BeamEntry& b) {
  if (a.log_prob != b.log_prob) return a.log_prob > b.log_prob;
  if (a.prefix != b.prefix) return a.prefix < b.prefix;
  return a.finished && !b.finished;
}

// Masked log-probabilities over items and END at step t. END is always
// excluded at t = 1 so that no bundle is empty.
inline std::vector<double> step_log_probs(const InferenceModel& im, const Tensor& hidden,
                                          std::size_t t, std::span<const ItemId> prefix,
                                          int shift) {
  std::vector<double> mask = mask_vector(t, prefix, im.n_items(), shift);
  if (t == 1) mask.back() = numerics::kInf;
  return numerics::masked_log_softmax(im.logits(hidden), mask);
}

}  // namespace detail

// Masked log-probability of decoding `sequence` then END, the score beam
// search assigns to that path.
inline double sequence_log_prob(const InferenceModel& im, std::span<const ItemId> context,
                                std::span<const ItemId> sequence, int shift = 0) {
  if (sequence.empty()) throw Error(ErrorKind::kDegenerateInput, "empty sequence");
  const QualityModel& m = im.model();
  Tape t(false);
  const Encoded enc = m.encode(t, context);
  DecoderState state = m.initial_state(t, enc, 1);
  ItemId prev = m.vocab().bos();
  double lp = 0.0;
  for (std::size_t step = 1; step <= sequence.size() + 1; ++step) {
    const ItemId one[] = {prev};
    auto out = m.decoder_step(t, state, one, enc);
    const auto prefix = sequence.first(step - 1);
    const auto logp = detail::step_log_probs(im, out.hidden.value(), step, prefix, shift);
    const std::size_t target = step <= sequence.size()
                                   ? static_cast<std::size_t>(sequence[step - 1])
                                   : im.n_items();
    if (target > im.n_items()) throw Error(ErrorKind::kUnknownItem, "sequence item");
    lp += logp[target];
    state = std::move(out.state);
    if (step <= sequence.size()) prev = sequence[step - 1];
  }
  return lp;
}

// Masked beam search. Each step keeps the top-M entries among the
// extensions of open beams and the finished entries carried forward.
// Open beams left after T steps are closed by forcing END.
inline CandidateSet beam_search(const InferenceModel& im, std::span<const ItemId> context,
                                const GenerationConfig& cfg, BeamTrace* trace = nullptr) {
  cfg.validate();
  const QualityModel& m = im.model();
  const std::size_t n = im.n_items();
  const std::size_t width = cfg.beam_width;
  Tape t(false);
  const Encoded enc = m.encode(t, context);

  std::vector<detail::OpenBeam> open(1);
  open[0].state = m.initial_state(t, enc, 1);
  open[0].last = m.vocab().bos();
  std::vector<BeamEntry> finished;

  for (std::size_t step = 1; step <= cfg.max_bundle_size && !open.empty(); ++step) {
    struct Child {
      BeamEntry entry;
      std::size_t parent;
    };
    std::vector<Child> pool;
    for (BeamEntry& f : finished) pool.push_back({std::move(f), 0});
    std::vector<DecoderState> next_states(open.size());
    for (std::size_t b = 0; b < open.size(); ++b) {
      const detail::OpenBeam& beam = open[b];
      const ItemId one[] = {beam.last};
      auto out = m.decoder_step(t, beam.state, one, enc);
      next_states[b] = std::move(out.state);
      const auto logp =
          detail::step_log_probs(im, out.hidden.value(), step, beam.entry.prefix, cfg.shift);
      if (std::isfinite(logp[n])) {
        pool.push_back({{beam.entry.prefix, beam.entry.log_prob + logp[n], true}, b});
      }
      // At most M children of one parent can survive, so rank them locally.
      std::vector<std::size_t> idx;
      for (std::size_t j = 0; j < n; ++j) {
        if (std::isfinite(logp[j])) idx.push_back(j);
      }
      const std::size_t keep = std::min(width, idx.size());
      auto by_score = [&](std::size_t a, std::size_t c) {
        return logp[a] != logp[c] ? logp[a] > logp[c] : a < c;
      };
      std::partial_sort(idx.begin(), idx.begin() + static_cast<std::ptrdiff_t>(keep), idx.end(),
                        by_score);
      for (std::size_t r = 0; r < keep; ++r) {
        BeamEntry e{beam.entry.prefix, beam.entry.log_prob + logp[idx[r]], false};
        e.prefix.push_back(static_cast<ItemId>(idx[r]));
        pool.push_back({std::move(e), b});
      }
    }
    std::sort(pool.begin(), pool.end(),
              [](const Child& a, const Child& b) { return detail::entry_before(a.entry, b.entry); });
    if (pool.size() > width) pool.resize(width);

    finished.clear();
    std::vector<detail::OpenBeam> next;
    for (Child& c : pool) {
      if (c.entry.finished) {
        finished.push_back(std::move(c.entry));
      } else {
        detail::OpenBeam ob;
        ob.last = c.entry.prefix.back();
        ob.state = next_states[c.parent];
        ob.entry = std::move(c.entry);
        next.push_back(std::move(ob));
      }
    }
    open = std::move(next);
    if (trace) {
      std::vector<BeamEntry> kept;
      for (const BeamEntry& f : finished) kept.push_back(f);
      for (const auto& ob : open) kept.push_back(ob.entry);
      std::sort(kept.begin(), kept.end(), detail::entry_before);
      trace->steps.push_back(std::move(kept));
    }
  }

  // Close what is still open with END at step T + 1.
  for (detail::OpenBeam& beam : open) {
    const ItemId one[] = {beam.last};
    auto out = m.decoder_step(t, beam.state, one, enc);
    const auto logp = detail::step_log_probs(im, out.hidden.value(), cfg.max_bundle_size + 1,
                                             beam.entry.prefix, cfg.shift);
    beam.entry.log_prob += logp[n];
    beam.entry.finished = true;
    finished.push_back(std::move(beam.entry));
  }

  std::vector<Candidate> raw;
  raw.reserve(finished.size());
  for (BeamEntry& e : finished) raw.push_back({std::move(e.prefix), e.log_prob});
  return CandidateSet::from(std::move(raw));
}

}  // namespace bundlegen::generate
