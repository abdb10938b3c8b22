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
#include <cstdint>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "bundlegen/core/types.hpp"
#include "bundlegen/error.hpp"
#include "bundlegen/model/config.hpp"
#include "bundlegen/numerics/tape.hpp"

namespace bundlegen::model {

using numerics::Parameter;
using numerics::Tape;
using numerics::Tensor;
using numerics::Var;

// Text-CNN output for one user context.
struct Encoded {
  Var h0;          // 1 x hidden, pooled summary
  Var memory;      // L x channels, per-position feature maps (attention keys)
  std::size_t length = 0;
};

struct DecoderState {
  std::vector<Var> h;  // per layer, B x hidden
  std::vector<Var> c;
};

struct StepOutput {
  DecoderState state;
  Var hidden;  // B x hidden attentional vector h_t fed to the softmax
};

// q(b | C_u; θ): text-CNN context encoder, stacked LSTM decoder with
// multiplicative attention, and a feature-aware (or id-only) softmax head.
//
// Every forward method has a const overload; on a const model parameters
// enter the tape as constants, so frozen models can be shared across threads.
class QualityModel {
 public:
  QualityModel(ModelConfig cfg, Vocabulary vocab)
      : cfg_(std::move(cfg)), vocab_(std::move(vocab)) {
    cfg_.validate();
    if (vocab_.size() <= 0) {
      throw Error(ErrorKind::kInvalidArgument, "empty vocabulary");
    }
    std::mt19937_64 rng(cfg_.seed);
    std::normal_distribution<double> normal(0.0, cfg_.init_scale);
    auto add = [&](std::string name, std::size_t r, std::size_t c, bool random) {
      Tensor t(r, c);
      if (random) {
        for (double& v : t.values()) v = normal(rng);
      }
      params_.emplace_back(std::move(name), std::move(t));
      return params_.size() - 1;
    };
    const std::size_t dx = cfg_.feature_dim();
    const std::size_t hd = cfg_.hidden_dim;
    const std::size_t ch = cfg_.cnn_channels_per_window;
    const std::size_t enc = cfg_.encoder_channels();
    item_emb_ = add("item_emb", vocab_.token_count(), cfg_.embed_dim, true);
    cate_emb_ = add("cate_emb", std::max<std::int32_t>(1, vocab_.n_categories()),
                    cfg_.cate_dim, true);
    for (std::size_t k = 0; k < cfg_.cnn_window_sizes.size(); ++k) {
      const std::size_t w = cfg_.cnn_window_sizes[k];
      conv_kernel_.push_back(add("conv" + std::to_string(k) + ".kernel", w * dx, ch, true));
      conv_bias_.push_back(add("conv" + std::to_string(k) + ".bias", 1, ch, false));
    }
    enc_proj_ = add("enc.proj", enc, hd, true);
    enc_bias_ = add("enc.bias", 1, hd, false);
    for (int l = 0; l < cfg_.decoder_layers; ++l) {
      const std::size_t in = (l == 0 ? dx : hd) + hd;
      lstm_w_.push_back(add("lstm" + std::to_string(l) + ".w", in, 4 * hd, true));
      lstm_b_.push_back(add("lstm" + std::to_string(l) + ".b", 1, 4 * hd, false));
      // forget-gate bias 1
      Tensor& b = params_.back().value;
      for (std::size_t j = hd; j < 2 * hd; ++j) b[j] = 1.0;
    }
    attn_w_ = add("attn.w", hd, enc, true);
    attn_out_ = add("attn.out", enc + hd, hd, true);
    attn_out_bias_ = add("attn.out_bias", 1, hd, false);
    if (cfg_.softmax == SoftmaxKind::kFeatureAware) {
      fa_w1_ = add("fa.w1", dx, hd, true);
      fa_b1_ = add("fa.b1", 1, hd, false);
      fa_w2_ = add("fa.w2", hd, hd, true);
    } else {
      out_table_ = add("out.table", vocab_.token_count(), hd, true);
    }
    for (Parameter& p : params_) p.zero_grad();
  }

  const ModelConfig& config() const { return cfg_; }
  const Vocabulary& vocab() const { return vocab_; }

  std::vector<Parameter*> parameters() {
    std::vector<Parameter*> out;
    for (Parameter& p : params_) out.push_back(&p);
    return out;
  }
  const std::vector<Parameter>& parameter_values() const { return params_; }

  Parameter* find_parameter(const std::string& name) {
    for (Parameter& p : params_) {
      if (p.name == name) return &p;
    }
    return nullptr;
  }

  void zero_grad() {
    for (Parameter& p : params_) p.zero_grad();
  }

  double squared_norm() const {
    double s = 0.0;
    for (const Parameter& p : params_) {
      for (double v : p.value.values()) s += v * v;
    }
    return s;
  }

  // Candidate list of a full softmax: every item, then END.
  std::vector<ItemId> full_candidates() const {
    std::vector<ItemId> c(vocab_.size() + 1);
    for (ItemId i = 0; i < vocab_.size(); ++i) c[i] = i;
    c.back() = vocab_.end();
    return c;
  }

  std::size_t end_index() const { return static_cast<std::size_t>(vocab_.size()); }

  // Keeps the most recent max_context items.
  std::span<const ItemId> truncate(std::span<const ItemId> history) const {
    const std::size_t cap = cfg_.max_context;
    return history.size() > cap ? history.subspan(history.size() - cap) : history;
  }

  // x = [item_emb, cate_emb, price feature] per token; PAD and UNK are zero.
  Var embed(Tape& t, std::span<const ItemId> tokens) { return embed_impl(*this, t, tokens); }
  Var embed(Tape& t, std::span<const ItemId> tokens) const {
    return embed_impl(*this, t, tokens);
  }

  Encoded encode(Tape& t, std::span<const ItemId> history) {
    return encode_impl(*this, t, history);
  }
  Encoded encode(Tape& t, std::span<const ItemId> history) const {
    return encode_impl(*this, t, history);
  }

  // Every layer starts from h0 with zero cell state.
  DecoderState initial_state(Tape& t, const Encoded& enc, std::size_t batch) const {
    const Tensor& h0 = enc.h0.value();
    Tensor rows(batch, h0.cols());
    for (std::size_t r = 0; r < batch; ++r) {
      std::copy(h0.values().begin(), h0.values().end(), rows.row_span(r).begin());
    }
    DecoderState s;
    for (int l = 0; l < cfg_.decoder_layers; ++l) {
      s.h.push_back(batch == 1 ? enc.h0 : t.constant(rows));
      s.c.push_back(t.constant(Tensor(batch, h0.cols())));
    }
    return s;
  }

  StepOutput decoder_step(Tape& t, const DecoderState& s, std::span<const ItemId> prev,
                          const Encoded& enc) {
    return step_impl(*this, t, s, prev, enc);
  }
  StepOutput decoder_step(Tape& t, const DecoderState& s, std::span<const ItemId> prev,
                          const Encoded& enc) const {
    return step_impl(*this, t, s, prev, enc);
  }

  // Output-layer rows for the given candidate tokens (items or END).
  Var weight_matrix(Tape& t, std::span<const ItemId> candidates) {
    return weights_impl(*this, t, candidates);
  }
  Var weight_matrix(Tape& t, std::span<const ItemId> candidates) const {
    return weights_impl(*this, t, candidates);
  }

  // E over full_candidates(), computed once per frozen model.
  Tensor full_weight_matrix() const {
    Tape t(false);
    const auto cand = full_candidates();
    return weight_matrix(t, cand).value();
  }

 private:
  template <class Self>
  static Var embed_impl(Self& self, Tape& t, std::span<const ItemId> tokens) {
    const Vocabulary& v = self.vocab_;
    std::vector<std::int32_t> item_rows(tokens.size());
    std::vector<std::int32_t> cate_rows(tokens.size());
    Tensor price(tokens.size(), 1);
    for (std::size_t i = 0; i < tokens.size(); ++i) {
      const ItemId tok = tokens[i];
      if (tok < 0 || tok >= v.token_count()) {
        throw Error(ErrorKind::kUnknownItem, "token " + std::to_string(tok));
      }
      const bool zero = tok == v.pad() || tok == v.unk();
      item_rows[i] = zero ? -1 : tok;
      cate_rows[i] = v.category_index(tok);
      price(i, 0) = v.price_feature(tok);
    }
    const Var parts[] = {t.gather(self.params_[self.item_emb_], item_rows),
                         t.gather(self.params_[self.cate_emb_], cate_rows),
                         t.constant(std::move(price))};
    return t.concat_cols(parts);
  }

  template <class Self>
  static Encoded encode_impl(Self& self, Tape& t, std::span<const ItemId> history) {
    if (history.empty()) throw Error(ErrorKind::kEmptyContext, "empty user context");
    history = self.truncate(history);
    const std::size_t len = history.size();
    const std::size_t ch = self.cfg_.cnn_channels_per_window;
    const Var x = embed_impl(self, t, history);
    std::vector<Var> pooled;
    std::vector<Var> maps;
    for (std::size_t k = 0; k < self.cfg_.cnn_window_sizes.size(); ++k) {
      const std::size_t w = self.cfg_.cnn_window_sizes[k];
      if (w > len) {
        pooled.push_back(t.constant(Tensor(1, ch)));
        maps.push_back(t.constant(Tensor(len, ch)));
        continue;
      }
      const Var windows = t.unfold(x, w);
      const Var fmap = t.tanh(t.add(t.matmul(windows, t.param(self.params_[self.conv_kernel_[k]])),
                                    t.param(self.params_[self.conv_bias_[k]])));
      pooled.push_back(t.max_pool_rows(fmap));
      maps.push_back(t.pad_rows(fmap, len));
    }
    Encoded e;
    const Var summary = t.concat_cols(pooled);
    e.h0 = t.tanh(t.add(t.matmul(summary, t.param(self.params_[self.enc_proj_])),
                        t.param(self.params_[self.enc_bias_])));
    e.memory = t.concat_cols(maps);
    e.length = len;
    return e;
  }

  template <class Self>
  static StepOutput step_impl(Self& self, Tape& t, const DecoderState& s,
                              std::span<const ItemId> prev, const Encoded& enc) {
    const std::size_t hd = self.cfg_.hidden_dim;
    Var input = embed_impl(self, t, prev);
    StepOutput out;
    for (int l = 0; l < self.cfg_.decoder_layers; ++l) {
      const Var cat[] = {input, s.h[l]};
      const Var z = t.add(t.matmul(t.concat_cols(cat), t.param(self.params_[self.lstm_w_[l]])),
                          t.param(self.params_[self.lstm_b_[l]]));
      const Var gi = t.sigmoid(t.slice_cols(z, 0, hd));
      const Var gf = t.sigmoid(t.slice_cols(z, hd, hd));
      const Var gg = t.tanh(t.slice_cols(z, 2 * hd, hd));
      const Var go = t.sigmoid(t.slice_cols(z, 3 * hd, hd));
      const Var c = t.add(t.mul(gf, s.c[l]), t.mul(gi, gg));
      const Var h = t.mul(go, t.tanh(c));
      out.state.h.push_back(h);
      out.state.c.push_back(c);
      // Residual connections between stacked layers.
      input = l == 0 ? h : t.add(input, h);
    }
    const Var query = t.matmul(input, t.param(self.params_[self.attn_w_]));
    const Var weights = t.softmax_rows(t.matmul_nt(query, enc.memory));
    const Var context = t.matmul(weights, enc.memory);
    const Var cat[] = {context, input};
    out.hidden = t.tanh(t.add(t.matmul(t.concat_cols(cat), t.param(self.params_[self.attn_out_])),
                              t.param(self.params_[self.attn_out_bias_])));
    return out;
  }

  template <class Self>
  static Var weights_impl(Self& self, Tape& t, std::span<const ItemId> candidates) {
    if (candidates.empty()) {
      throw Error(ErrorKind::kInvalidArgument, "empty candidate set");
    }
    if (self.cfg_.softmax == SoftmaxKind::kIdOnly) {
      std::vector<std::int32_t> rows(candidates.begin(), candidates.end());
      return t.gather(self.params_[self.out_table_], rows);
    }
    const Var x = embed_impl(self, t, candidates);
    const Var hidden = t.tanh(t.add(t.matmul(x, t.param(self.params_[self.fa_w1_])),
                                    t.param(self.params_[self.fa_b1_])));
    return t.matmul(hidden, t.param(self.params_[self.fa_w2_]));
  }

  ModelConfig cfg_;
  Vocabulary vocab_;
  std::vector<Parameter> params_;
  std::size_t item_emb_ = 0, cate_emb_ = 0;
  std::vector<std::size_t> conv_kernel_, conv_bias_;
  std::size_t enc_proj_ = 0, enc_bias_ = 0;
  std::vector<std::size_t> lstm_w_, lstm_b_;
  std::size_t attn_w_ = 0, attn_out_ = 0, attn_out_bias_ = 0;
  std::size_t fa_w1_ = 0, fa_b1_ = 0, fa_w2_ = 0;
  std::size_t out_table_ = 0;
};

}  // namespace bundlegen::model
