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
#include <functional>
#include <span>
#include <string>

#include "bundlegen/numerics/tape.hpp"

namespace bundlegen::numerics {

struct GradCheckResult {
  double max_rel_error = 0.0;
  std::string worst_param;
  std::size_t worst_index = 0;
  double worst_fd = 0.0;
  double worst_ad = 0.0;
  std::size_t checked = 0;
};

// `loss(true)` must return the scalar and add its gradient into every
// Parameter::grad; `loss(false)` only returns the scalar.
using LossFn = std::function<double(bool with_grad)>;

// Compares tape gradients with fourth-order central differences,
// (-f(x+2h) + 8f(x+h) - 8f(x-h) + f(x-2h)) / 12h, and reports the maximum of
// |g_fd - g_ad| / (|g_fd| + |g_ad| + 1e-8) over every scalar parameter.
inline GradCheckResult grad_check_detailed(const LossFn& loss,
                                           std::span<Parameter* const> params,
                                           double h = 1e-4) {
  for (Parameter* p : params) p->zero_grad();
  (void)loss(true);
  GradCheckResult res;
  for (Parameter* p : params) {
    const Tensor ad = p->grad;
    for (std::size_t i = 0; i < p->value.size(); ++i) {
      const double x0 = p->value[i];
      auto at = [&](double x) {
        p->value[i] = x;
        return loss(false);
      };
      const double fp2 = at(x0 + 2 * h);
      const double fp1 = at(x0 + h);
      const double fm1 = at(x0 - h);
      const double fm2 = at(x0 - 2 * h);
      p->value[i] = x0;
      const double fd = (8.0 * (fp1 - fm1) - (fp2 - fm2)) / (12.0 * h);
      const double err =
          std::abs(fd - ad[i]) / (std::abs(fd) + std::abs(ad[i]) + 1e-8);
      ++res.checked;
      if (err > res.max_rel_error) {
        res.max_rel_error = err;
        res.worst_param = p->name;
        res.worst_index = i;
        res.worst_fd = fd;
        res.worst_ad = ad[i];
      }
    }
  }
  return res;
}

inline double grad_check(const LossFn& loss, std::span<Parameter* const> params,
                         double h = 1e-4) {
  return grad_check_detailed(loss, params, h).max_rel_error;
}

}  // namespace bundlegen::numerics
