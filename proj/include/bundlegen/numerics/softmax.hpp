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
#include <limits>
#include <span>
#include <vector>

#include "bundlegen/error.hpp"
#include "bundlegen/numerics/tensor.hpp"

namespace bundlegen::numerics {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

// log Σ exp(x_i) with max subtraction. Entries equal to -inf contribute 0.
inline double log_sum_exp(std::span<const double> x) {
  double mx = -kInf;
  for (double v : x) mx = std::max(mx, v);
  if (mx == -kInf) {
    throw Error(ErrorKind::kAllMasked, "every logit is -inf");
  }
  double s = 0.0;
  for (double v : x) s += std::exp(v - mx);
  return mx + std::log(s);
}

inline std::vector<double> log_softmax(std::span<const double> logits) {
  const double lse = log_sum_exp(logits);
  std::vector<double> out(logits.size());
  for (std::size_t i = 0; i < logits.size(); ++i) out[i] = logits[i] - lse;
  return out;
}

inline std::vector<double> softmax(std::span<const double> logits) {
  std::vector<double> out = log_softmax(logits);
  for (double& v : out) v = std::exp(v);
  return out;
}

// Logits of h against every row of `weights` (one row per candidate).
inline std::vector<double> logits_against(std::span<const double> h,
                                          const Tensor& weights) {
  require_shape(h.size() == weights.cols(), "logits_against shape mismatch");
  std::vector<double> out(weights.rows());
  for (std::size_t j = 0; j < weights.rows(); ++j) {
    out[j] = dot(h, weights.row_span(j));
  }
  return out;
}

// softmax(h, W)_j = exp(h·w_j) / Σ exp(h·w_k)
inline std::vector<double> softmax(std::span<const double> h,
                                   const Tensor& weights) {
  const auto z = logits_against(h, weights);
  return softmax(z);
}

// Subtracts the mask from the logits in place. Infinite mask entries become
// -inf logits and therefore exactly zero probability.
inline void apply_mask(std::span<double> logits, std::span<const double> mask) {
  require_shape(logits.size() == mask.size(), "mask length mismatch");
  for (std::size_t j = 0; j < logits.size(); ++j) {
    if (mask[j] < 0.0 || std::isnan(mask[j])) {
      throw Error(ErrorKind::kInvalidArgument, "mask entries must be >= 0");
    }
    logits[j] = mask[j] == kInf ? -kInf : logits[j] - mask[j];
  }
}

inline std::vector<double> masked_log_softmax(std::span<const double> logits,
                                              std::span<const double> mask) {
  std::vector<double> z(logits.begin(), logits.end());
  apply_mask(z, mask);
  return log_softmax(z);
}

// exp(h·e_j - m_j) / Σ_k exp(h·e_k - m_k)
inline std::vector<double> masked_softmax(std::span<const double> h,
                                          const Tensor& weights,
                                          std::span<const double> mask) {
  auto z = logits_against(h, weights);
  apply_mask(z, mask);
  return softmax(z);
}

}  // namespace bundlegen::numerics
