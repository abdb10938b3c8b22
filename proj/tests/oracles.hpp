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

// Reference implementations used only by the tests. Each one takes the
// slow, direct route so that it shares no code with the library.

#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>
#include <vector>

namespace oracle {

inline constexpr double kNegInf = -std::numeric_limits<double>::infinity();

// log|det A| by Gaussian elimination with partial pivoting; -inf when a
// pivot falls to `tiny` or below.
inline double dense_log_det(std::vector<std::vector<double>> a, double tiny = 1e-12) {
  const std::size_t n = a.size();
  double ld = 0.0;
  for (std::size_t c = 0; c < n; ++c) {
    std::size_t p = c;
    for (std::size_t r = c + 1; r < n; ++r) {
      if (std::fabs(a[r][c]) > std::fabs(a[p][c])) p = r;
    }
    if (std::fabs(a[p][c]) <= tiny) return kNegInf;
    std::swap(a[p], a[c]);
    ld += std::log(std::fabs(a[c][c]));
    for (std::size_t r = c + 1; r < n; ++r) {
      const double f = a[r][c] / a[c][c];
      for (std::size_t k = c; k < n; ++k) a[r][k] -= f * a[c][k];
    }
  }
  return ld;
}

inline double jaccard(const std::vector<int>& a, const std::vector<int>& b) {
  std::set<int> sa(a.begin(), a.end()), sb(b.begin(), b.end()), u = sa;
  u.insert(sb.begin(), sb.end());
  std::size_t inter = 0;
  for (int x : sa) inter += sb.count(x);
  return static_cast<double>(inter) / static_cast<double>(u.size());
}

inline std::vector<std::vector<double>> jaccard_gram(const std::vector<std::vector<int>>& sets) {
  std::vector<std::vector<double>> g(sets.size(), std::vector<double>(sets.size()));
  for (std::size_t i = 0; i < sets.size(); ++i) {
    for (std::size_t j = 0; j < sets.size(); ++j) g[i][j] = jaccard(sets[i], sets[j]);
  }
  return g;
}

// Softmax straight from the definition, skipping masked entries.
inline std::vector<double> direct_softmax(const std::vector<double>& z,
                                          const std::vector<bool>& allowed) {
  double mx = kNegInf;
  for (std::size_t i = 0; i < z.size(); ++i) {
    if (allowed[i]) mx = std::max(mx, z[i]);
  }
  double total = 0.0;
  std::vector<double> p(z.size(), 0.0);
  for (std::size_t i = 0; i < z.size(); ++i) {
    if (allowed[i]) total += (p[i] = std::exp(z[i] - mx));
  }
  for (double& v : p) v /= total;
  return p;
}

inline double sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }

// -log σ(h·e⁺ − h·e⁻), the per-pair BPR loss.
inline double bpr(const std::vector<double>& h, const std::vector<double>& pos,
                  const std::vector<double>& neg) {
  double d = 0.0;
  for (std::size_t i = 0; i < h.size(); ++i) d += h[i] * (pos[i] - neg[i]);
  return -std::log(sigmoid(d));
}

// One greedy step of quality-plus-diversity selection evaluated with dense
// determinants over every remaining candidate. Returns the index, or -1 when
// every remaining candidate makes the kernel singular.
struct DenseStep {
  int index = -1;
  double score = kNegInf;
  double log_det = kNegInf;
};

inline DenseStep dense_greedy_step(const std::vector<std::vector<int>>& sets,
                                   const std::vector<double>& log_probs,
                                   const std::vector<int>& chosen, double lambda,
                                   double tiny) {
  DenseStep best;
  for (std::size_t i = 0; i < sets.size(); ++i) {
    if (std::find(chosen.begin(), chosen.end(), static_cast<int>(i)) != chosen.end()) continue;
    std::vector<std::vector<int>> sel;
    for (int c : chosen) sel.push_back(sets[c]);
    sel.push_back(sets[i]);
    const double ld = dense_log_det(jaccard_gram(sel), tiny);
    if (ld == kNegInf) continue;
    const double s = log_probs[i] + lambda * ld;
    bool better = best.index < 0 || s > best.score;
    if (!better && s == best.score) {
      const std::size_t b = static_cast<std::size_t>(best.index);
      if (log_probs[i] != log_probs[b]) {
        better = log_probs[i] > log_probs[b];
      } else {
        std::vector<int> x = sets[i], y = sets[b];
        std::sort(x.begin(), x.end());
        std::sort(y.begin(), y.end());
        better = x < y;
      }
    }
    if (better) best = {static_cast<int>(i), s, ld};
  }
  return best;
}

}  // namespace oracle
