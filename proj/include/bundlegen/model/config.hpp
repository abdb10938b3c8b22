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

#include <cstdint>
#include <string>
#include <vector>

#include "bundlegen/error.hpp"
#include "json.hpp"

namespace bundlegen::model {

// Output layer of the decoder. Feature-aware rows are computed from item
// features; id-only rows are a free per-token table.
enum class SoftmaxKind { kFeatureAware, kIdOnly };

inline const char* to_string(SoftmaxKind k) {
  return k == SoftmaxKind::kFeatureAware ? "feature-aware" : "id-only";
}

inline SoftmaxKind softmax_kind_from_string(const std::string& s) {
  if (s == "feature-aware" || s == "fa") return SoftmaxKind::kFeatureAware;
  if (s == "id-only" || s == "id") return SoftmaxKind::kIdOnly;
  throw Error(ErrorKind::kInvalidArgument, "unknown softmax kind " + s);
}

struct ModelConfig {
  int embed_dim = 16;
  int cate_dim = 8;
  int hidden_dim = 32;
  std::vector<int> cnn_window_sizes{1, 2, 4, 8};
  int cnn_channels_per_window = 8;
  int decoder_layers = 2;
  int n_neg_samples = 64;
  double l2_weight = 5e-5;
  double learning_rate = 5e-3;
  int batch_size = 16;
  std::uint64_t seed = 7;

  int max_context = 64;  // most recent items kept from a history
  int max_epochs = 8;
  int patience = 3;
  double init_scale = 0.1;
  SoftmaxKind softmax = SoftmaxKind::kFeatureAware;
  bool always_include_end = true;  // END is a candidate at every sampled step

  // Full-size settings for large catalogs.
  static ModelConfig full_size() {
    ModelConfig c;
    c.embed_dim = 64;
    c.cate_dim = 64;
    c.hidden_dim = 64;
    c.cnn_window_sizes = {1, 2, 4, 8, 12, 16, 32, 64};
    c.cnn_channels_per_window = 12;
    c.decoder_layers = 2;
    c.n_neg_samples = 1024;
    c.l2_weight = 5e-5;
    c.batch_size = 16;
    return c;
  }

  int feature_dim() const { return embed_dim + cate_dim + 1; }
  int encoder_channels() const {
    return static_cast<int>(cnn_window_sizes.size()) * cnn_channels_per_window;
  }

  void validate() const {
    if (embed_dim <= 0 || cate_dim <= 0 || hidden_dim <= 0 ||
        cnn_channels_per_window <= 0 || cnn_window_sizes.empty() ||
        decoder_layers < 1 || n_neg_samples < 1 || batch_size < 1 ||
        max_context < 1 || l2_weight < 0.0 || learning_rate < 0.0) {
      throw Error(ErrorKind::kInvalidArgument, "invalid model configuration");
    }
    for (int w : cnn_window_sizes) {
      if (w < 1) throw Error(ErrorKind::kInvalidArgument, "window size < 1");
    }
  }
};

inline nlohmann::json to_json(const ModelConfig& c) {
  return {{"embed_dim", c.embed_dim},
          {"cate_dim", c.cate_dim},
          {"hidden_dim", c.hidden_dim},
          {"cnn_window_sizes", c.cnn_window_sizes},
          {"cnn_channels_per_window", c.cnn_channels_per_window},
          {"decoder_layers", c.decoder_layers},
          {"n_neg_samples", c.n_neg_samples},
          {"l2_weight", c.l2_weight},
          {"learning_rate", c.learning_rate},
          {"batch_size", c.batch_size},
          {"seed", c.seed},
          {"max_context", c.max_context},
          {"max_epochs", c.max_epochs},
          {"patience", c.patience},
          {"init_scale", c.init_scale},
          {"softmax", to_string(c.softmax)},
          {"always_include_end", c.always_include_end}};
}

// Missing keys keep their defaults, so partial JSON documents are accepted.
inline ModelConfig model_config_from_json(const nlohmann::json& j,
                                          ModelConfig c = {}) {
  try {
    c.embed_dim = j.value("embed_dim", c.embed_dim);
    c.cate_dim = j.value("cate_dim", c.cate_dim);
    c.hidden_dim = j.value("hidden_dim", c.hidden_dim);
    c.cnn_window_sizes = j.value("cnn_window_sizes", c.cnn_window_sizes);
    c.cnn_channels_per_window =
        j.value("cnn_channels_per_window", c.cnn_channels_per_window);
    c.decoder_layers = j.value("decoder_layers", c.decoder_layers);
    c.n_neg_samples = j.value("n_neg_samples", c.n_neg_samples);
    c.l2_weight = j.value("l2_weight", c.l2_weight);
    c.learning_rate = j.value("learning_rate", c.learning_rate);
    c.batch_size = j.value("batch_size", c.batch_size);
    c.seed = j.value("seed", c.seed);
    c.max_context = j.value("max_context", c.max_context);
    c.max_epochs = j.value("max_epochs", c.max_epochs);
    c.patience = j.value("patience", c.patience);
    c.init_scale = j.value("init_scale", c.init_scale);
    if (j.contains("softmax")) {
      c.softmax = softmax_kind_from_string(j.at("softmax").get<std::string>());
    }
    c.always_include_end = j.value("always_include_end", c.always_include_end);
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::kInvalidArgument, std::string("model config: ") + e.what());
  }
  c.validate();
  return c;
}

}  // namespace bundlegen::model
