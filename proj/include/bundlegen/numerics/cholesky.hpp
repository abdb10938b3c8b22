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
#include <span>
#include <utility>
#include <vector>

#include "bundlegen/error.hpp"

namespace bundlegen::numerics {

// Lower-triangular Cholesky factor of a growing symmetric PSD matrix, kept
// alongside its log-determinant. Extending by one row/column costs O(k^2).
class CholeskyState {
 public:
  struct Extension {
    double log_det = 0.0;  // log det of the extended matrix
    double schur = 0.0;    // pivot before any jitter
    bool jittered = false;
  };

  std::size_t dim() const { return rows_.size(); }
  double log_det() const { return log_det_; }
  bool jittered() const { return jittered_; }

  double at(std::size_t i, std::size_t j) const {
    return j <= i ? rows_[i][j] : 0.0;
  }

  // Solves L z = row and returns diag - |z|^2, the squared pivot the next
  // extension would get. `row` holds the new column's entries against the
  // current members.
  double schur_complement(std::span<const double> row, double diag,
                          std::vector<double>* z_out = nullptr) const {
    if (row.size() != dim()) {
      throw Error(ErrorKind::kInvalidArgument, "cholesky row length mismatch");
    }
    std::vector<double> z(dim());
    double norm2 = 0.0;
    for (std::size_t i = 0; i < dim(); ++i) {
      double s = row[i];
      const auto& li = rows_[i];
      for (std::size_t j = 0; j < i; ++j) s -= li[j] * z[j];
      z[i] = s / li[i];
      norm2 += z[i] * z[i];
    }
    if (z_out) *z_out = std::move(z);
    return diag - norm2;
  }

  Extension extend(std::span<const double> row, double diag, double jitter) {
    std::vector<double> z;
    const double schur = schur_complement(row, diag, &z);
    Extension ext;
    ext.schur = schur;
    double pivot = schur;
    if (pivot <= jitter) {
      pivot += jitter;
      ext.jittered = true;
    }
    if (!(pivot > 0.0)) {
      throw Error(ErrorKind::kSingularKernel,
                  "non-positive pivot after jitter: " + std::to_string(schur));
    }
    const double d = std::sqrt(pivot);
    z.push_back(d);
    rows_.push_back(std::move(z));
    log_det_ += 2.0 * std::log(d);
    jittered_ = jittered_ || ext.jittered;
    ext.log_det = log_det_;
    return ext;
  }

 private:
  std::vector<std::vector<double>> rows_;
  double log_det_ = 0.0;
  bool jittered_ = false;
};

// Functional form: returns the extended state and its log-determinant.
inline std::pair<CholeskyState, double> logdet_extend(
    CholeskyState state, std::span<const double> new_row, double diag,
    double jitter = 1e-9) {
  const auto ext = state.extend(new_row, diag, jitter);
  return {std::move(state), ext.log_det};
}

}  // namespace bundlegen::numerics
