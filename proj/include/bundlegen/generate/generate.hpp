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

#include <span>
#include <string>
#include <vector>

#include "bundlegen/core/parallel.hpp"
#include "bundlegen/generate/beam_search.hpp"
#include "bundlegen/generate/dpp.hpp"
#include "json.hpp"

namespace bundlegen::generate {

// Per-step view of the pipeline: the list DPP selection would return from the
// entries kept after step t. Steps with fewer than K entries keep a partial list.
struct GenerateTrace {
  BeamTrace beams;
  std::vector<BundleList> lists;
  DppTrace final_selection;
};

inline BundleList generate(const InferenceModel& im, std::span<const ItemId> context,
                           const GenerationConfig& cfg, GenerateTrace* trace = nullptr) {
  const CandidateSet cands = beam_search(im, context, cfg, trace ? &trace->beams : nullptr);
  if (trace) {
    for (const auto& kept : trace->beams.steps) {
      std::vector<Candidate> raw;
      for (const BeamEntry& e : kept) raw.push_back({e.prefix, e.log_prob});
      try {
        trace->lists.push_back(dpp_select(CandidateSet::from(std::move(raw)), cfg));
      } catch (const ShortListError& e) {
        trace->lists.push_back(e.partial());
      }
    }
  }
  return dpp_select(cands, cfg, trace ? &trace->final_selection : nullptr);
}

// Runs generate for every context in parallel; results keep input order.
inline std::vector<BundleList> generate_all(const InferenceModel& im,
                                            std::span<const UserContext> users,
                                            const GenerationConfig& cfg,
                                            unsigned threads = thread_count()) {
  std::vector<BundleList> out(users.size());
  parallel_for(users.size(), threads,
               [&](std::size_t i) { out[i] = generate(im, users[i].history, cfg); });
  return out;
}

// Candidate sets for every context. Selection for several λ or K values
// can then reuse them, since beam search depends only on M, T and C.
inline std::vector<CandidateSet> beam_search_all(const InferenceModel& im,
                                                 std::span<const UserContext> users,
                                                 const GenerationConfig& cfg,
                                                 unsigned threads = thread_count()) {
  std::vector<CandidateSet> out(users.size());
  parallel_for(users.size(), threads,
               [&](std::size_t i) { out[i] = beam_search(im, users[i].history, cfg); });
  return out;
}

// One recommendation line with raw item ids.
inline nlohmann::json recommendation_to_json(RawId user, const BundleList& list,
                                             const Vocabulary& vocab,
                                             const GenerationConfig& cfg) {
  nlohmann::json bundles = nlohmann::json::array();
  for (const Bundle& b : list.bundles) {
    nlohmann::json ids = nlohmann::json::array();
    for (ItemId id : b.items()) ids.push_back(vocab.raw_id(id));
    bundles.push_back(std::move(ids));
  }
  return {{"user", user}, {"bundles", std::move(bundles)}, {"log_probs", list.scores},
          {"lambda", cfg.lambda}, {"C", cfg.shift}};
}

}  // namespace bundlegen::generate
