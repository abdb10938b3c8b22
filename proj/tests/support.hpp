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

#include <random>
#include <vector>

#include "bundlegen.hpp"

namespace testing_support {

using bundlegen::Item;
using bundlegen::ItemId;
using bundlegen::Vocabulary;

// n items with raw ids 100, 101, ... spread over `n_cat` categories and
// distinct prices.
inline Vocabulary small_vocab(int n, int n_cat = 3, std::uint64_t seed = 1) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> price(1.0, 50.0);
  std::vector<Item> items;
  for (int i = 0; i < n; ++i) {
    Item it;
    it.raw_id = 100 + i;
    it.category = i % n_cat;
    it.price = std::round(price(rng) * 100.0) / 100.0 + 0.001 * i;
    items.push_back(it);
  }
  return Vocabulary(std::move(items));
}

// A model small enough for finite differences and exhaustive enumeration.
inline bundlegen::model::ModelConfig tiny_config(std::uint64_t seed = 3) {
  bundlegen::model::ModelConfig c;
  c.embed_dim = 4;
  c.cate_dim = 2;
  c.hidden_dim = 4;
  c.cnn_window_sizes = {1, 2};
  c.cnn_channels_per_window = 2;
  c.decoder_layers = 2;
  c.n_neg_samples = 3;
  c.l2_weight = 1e-3;
  c.seed = seed;
  c.init_scale = 0.5;
  return c;
}

inline std::vector<ItemId> random_context(std::mt19937_64& rng, int n_items, int len) {
  std::uniform_int_distribution<int> pick(0, n_items - 1);
  std::vector<ItemId> c(len);
  for (auto& v : c) v = pick(rng);
  return c;
}

}  // namespace testing_support
