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
#include <cstdint>
#include <functional>
#include <limits>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "bundlegen/error.hpp"
#include "bundlegen/numerics/tensor.hpp"

namespace bundlegen::numerics {

struct Parameter {
  std::string name;
  Tensor value;
  Tensor grad;

  Parameter() = default;
  Parameter(std::string n, Tensor v)
      : name(std::move(n)), value(std::move(v)),
        grad(value.rows(), value.cols()) {}

  void zero_grad() {
    if (!grad.same_shape(value)) grad = Tensor(value.rows(), value.cols());
    grad.fill(0.0);
  }
};

class Tape;

// Handle to a node on a Tape. Cheap to copy; only valid while its tape lives.
class Var {
 public:
  Var() = default;
  const Tensor& value() const;
  std::size_t rows() const { return value().rows(); }
  std::size_t cols() const { return value().cols(); }
  double scalar() const { return value()[0]; }
  std::size_t id() const { return id_; }

 private:
  friend class Tape;
  Var(Tape* tape, std::size_t id) : tape_(tape), id_(id) {}
  Tape* tape_ = nullptr;
  std::size_t id_ = 0;
};

// Reverse-mode recorder over dense matrices. Nodes are appended in evaluation
// order, so that order is already topological and backward() walks it once in
// reverse. With recording off the tape only computes values.
class Tape {
 public:
  explicit Tape(bool record = true) : record_(record) {}
  Tape(const Tape&) = delete;
  Tape& operator=(const Tape&) = delete;

  bool recording() const { return record_; }
  std::size_t node_count() const { return nodes_.size(); }
  const Tensor& value(Var v) const { return nodes_[v.id_].value; }

  Var constant(Tensor t) { return push(std::move(t), false, nullptr); }

  Var param(Parameter& p) {
    Parameter* pp = &p;
    return push(p.value, true, [pp](Tape& t, std::size_t self) {
      add_into(pp->grad, t.nodes_[self].grad);
    });
  }

  // Read-only parameter access: the value enters as a constant.
  Var param(const Parameter& p) { return push(p.value, false, nullptr); }

  Var gather(const Parameter& table, std::span<const std::int32_t> rows) {
    return push(gather_rows(table.value, rows), false, nullptr);
  }

  // Rows of a parameter table; negative indices yield zero rows.
  Var gather(Parameter& table, std::span<const std::int32_t> rows) {
    const std::size_t c = table.value.cols();
    Tensor out = gather_rows(table.value, rows);
    Parameter* tp = &table;
    std::vector<std::int32_t> idx(rows.begin(), rows.end());
    return push(std::move(out), true,
                [tp, idx = std::move(idx), c](Tape& t, std::size_t self) {
                  const Tensor& g = t.nodes_[self].grad;
                  for (std::size_t r = 0; r < idx.size(); ++r) {
                    if (idx[r] < 0) continue;
                    double* dst = tp->grad.data() + idx[r] * c;
                    const double* src = g.data() + r * c;
                    for (std::size_t j = 0; j < c; ++j) dst[j] += src[j];
                  }
                });
  }

  Var matmul(Var a, Var b) {
    const Tensor& av = value(a);
    const Tensor& bv = value(b);
    require_shape(av.cols() == bv.rows(), "tape matmul shape mismatch");
    Tensor out(av.rows(), bv.cols());
    gemm_acc(av, bv, out);
    return push(std::move(out), needs(a, b), [a, b](Tape& t, std::size_t self) {
      const Tensor& g = t.nodes_[self].grad;
      if (t.wants(a)) gemm_nt_acc(g, t.value(b), t.grad_of(a));
      if (t.wants(b)) gemm_tn_acc(t.value(a), g, t.grad_of(b));
    });
  }

  // a * b^T
  Var matmul_nt(Var a, Var b) {
    const Tensor& av = value(a);
    const Tensor& bv = value(b);
    require_shape(av.cols() == bv.cols(), "tape matmul_nt shape mismatch");
    Tensor out(av.rows(), bv.rows());
    gemm_nt_acc(av, bv, out);
    return push(std::move(out), needs(a, b), [a, b](Tape& t, std::size_t self) {
      const Tensor& g = t.nodes_[self].grad;
      if (t.wants(a)) gemm_acc(g, t.value(b), t.grad_of(a));
      if (t.wants(b)) gemm_tn_acc(g, t.value(a), t.grad_of(b));
    });
  }

  // a + b, where b either matches a or is a single row broadcast over a.
  Var add(Var a, Var b) {
    const Tensor& av = value(a);
    const Tensor& bv = value(b);
    const bool broadcast = bv.rows() == 1 && av.rows() != 1;
    require_shape(av.cols() == bv.cols() && (broadcast || av.rows() == bv.rows()),
                  "tape add shape mismatch");
    Tensor out = av;
    for (std::size_t r = 0; r < out.rows(); ++r) {
      auto o = out.row_span(r);
      auto s = bv.row_span(broadcast ? 0 : r);
      for (std::size_t j = 0; j < o.size(); ++j) o[j] += s[j];
    }
    return push(std::move(out), needs(a, b),
                [a, b, broadcast](Tape& t, std::size_t self) {
                  const Tensor& g = t.nodes_[self].grad;
                  if (t.wants(a)) add_into(t.grad_of(a), g);
                  if (t.wants(b)) {
                    Tensor& gb = t.grad_of(b);
                    if (!broadcast) {
                      add_into(gb, g);
                    } else {
                      for (std::size_t r = 0; r < g.rows(); ++r) {
                        auto s = g.row_span(r);
                        for (std::size_t j = 0; j < s.size(); ++j) gb[j] += s[j];
                      }
                    }
                  }
                });
  }

  Var sub(Var a, Var b) {
    const Tensor& av = value(a);
    const Tensor& bv = value(b);
    require_shape(av.same_shape(bv), "tape sub shape mismatch");
    Tensor out = av;
    for (std::size_t i = 0; i < out.size(); ++i) out[i] -= bv[i];
    return push(std::move(out), needs(a, b), [a, b](Tape& t, std::size_t self) {
      const Tensor& g = t.nodes_[self].grad;
      if (t.wants(a)) add_into(t.grad_of(a), g);
      if (t.wants(b)) add_into(t.grad_of(b), g, -1.0);
    });
  }

  // Elementwise product.
  Var mul(Var a, Var b) {
    const Tensor& av = value(a);
    const Tensor& bv = value(b);
    require_shape(av.same_shape(bv), "tape mul shape mismatch");
    Tensor out = av;
    for (std::size_t i = 0; i < out.size(); ++i) out[i] *= bv[i];
    return push(std::move(out), needs(a, b), [a, b](Tape& t, std::size_t self) {
      const Tensor& g = t.nodes_[self].grad;
      if (t.wants(a)) {
        Tensor& ga = t.grad_of(a);
        const Tensor& bv2 = t.value(b);
        for (std::size_t i = 0; i < g.size(); ++i) ga[i] += g[i] * bv2[i];
      }
      if (t.wants(b)) {
        Tensor& gb = t.grad_of(b);
        const Tensor& av2 = t.value(a);
        for (std::size_t i = 0; i < g.size(); ++i) gb[i] += g[i] * av2[i];
      }
    });
  }

  Var scale(Var a, double s) {
    Tensor out = value(a);
    for (double& v : out.values()) v *= s;
    return push(std::move(out), needs(a), [a, s](Tape& t, std::size_t self) {
      add_into(t.grad_of(a), t.nodes_[self].grad, s);
    });
  }

  Var tanh(Var a) {
    Tensor out = value(a);
    for (double& v : out.values()) v = std::tanh(v);
    return push(std::move(out), needs(a), [a](Tape& t, std::size_t self) {
      const Tensor& y = t.nodes_[self].value;
      const Tensor& g = t.nodes_[self].grad;
      Tensor& ga = t.grad_of(a);
      for (std::size_t i = 0; i < g.size(); ++i) ga[i] += g[i] * (1.0 - y[i] * y[i]);
    });
  }

  Var sigmoid(Var a) {
    Tensor out = value(a);
    for (double& v : out.values()) v = 1.0 / (1.0 + std::exp(-v));
    return push(std::move(out), needs(a), [a](Tape& t, std::size_t self) {
      const Tensor& y = t.nodes_[self].value;
      const Tensor& g = t.nodes_[self].grad;
      Tensor& ga = t.grad_of(a);
      for (std::size_t i = 0; i < g.size(); ++i) ga[i] += g[i] * y[i] * (1.0 - y[i]);
    });
  }

  Var concat_cols(std::span<const Var> parts) {
    require_shape(!parts.empty(), "concat_cols of nothing");
    const std::size_t r = value(parts[0]).rows();
    std::size_t c = 0;
    bool ng = false;
    for (Var p : parts) {
      require_shape(value(p).rows() == r, "concat_cols row mismatch");
      c += value(p).cols();
      ng = ng || wants(p);
    }
    Tensor out(r, c);
    std::size_t off = 0;
    for (Var p : parts) {
      const Tensor& pv = value(p);
      for (std::size_t i = 0; i < r; ++i) {
        std::copy_n(pv.data() + i * pv.cols(), pv.cols(), out.data() + i * c + off);
      }
      off += pv.cols();
    }
    std::vector<Var> ps(parts.begin(), parts.end());
    return push(std::move(out), ng, [ps = std::move(ps)](Tape& t, std::size_t self) {
      const Tensor& g = t.nodes_[self].grad;
      std::size_t off2 = 0;
      for (Var p : ps) {
        const std::size_t pc = t.value(p).cols();
        if (t.wants(p)) {
          Tensor& gp = t.grad_of(p);
          for (std::size_t i = 0; i < g.rows(); ++i) {
            for (std::size_t j = 0; j < pc; ++j) gp(i, j) += g(i, off2 + j);
          }
        }
        off2 += pc;
      }
    });
  }

  Var slice_cols(Var a, std::size_t start, std::size_t len) {
    const Tensor& av = value(a);
    require_shape(start + len <= av.cols(), "slice_cols out of range");
    Tensor out(av.rows(), len);
    for (std::size_t i = 0; i < av.rows(); ++i) {
      for (std::size_t j = 0; j < len; ++j) out(i, j) = av(i, start + j);
    }
    return push(std::move(out), needs(a), [a, start, len](Tape& t, std::size_t self) {
      const Tensor& g = t.nodes_[self].grad;
      Tensor& ga = t.grad_of(a);
      for (std::size_t i = 0; i < g.rows(); ++i) {
        for (std::size_t j = 0; j < len; ++j) ga(i, start + j) += g(i, j);
      }
    });
  }

  // Zero-pads `a` at the bottom to `total_rows` rows.
  Var pad_rows(Var a, std::size_t total_rows) {
    const Tensor& av = value(a);
    require_shape(total_rows >= av.rows(), "pad_rows shrinks");
    Tensor out(total_rows, av.cols());
    std::copy(av.values().begin(), av.values().end(), out.values().begin());
    return push(std::move(out), needs(a), [a](Tape& t, std::size_t self) {
      const Tensor& g = t.nodes_[self].grad;
      Tensor& ga = t.grad_of(a);
      for (std::size_t i = 0; i < ga.size(); ++i) ga[i] += g[i];
    });
  }

  // Sliding windows of `width` consecutive rows, each flattened into one row:
  // output row p is [a_p, a_{p+1}, ..., a_{p+width-1}].
  Var unfold(Var a, std::size_t width) {
    const Tensor& av = value(a);
    require_shape(width >= 1 && width <= av.rows(), "unfold width out of range");
    const std::size_t n = av.rows() - width + 1;
    const std::size_t d = av.cols();
    Tensor out(n, width * d);
    for (std::size_t p = 0; p < n; ++p) {
      std::copy_n(av.data() + p * d, width * d, out.data() + p * width * d);
    }
    return push(std::move(out), needs(a), [a, width, n, d](Tape& t, std::size_t self) {
      const Tensor& g = t.nodes_[self].grad;
      Tensor& ga = t.grad_of(a);
      for (std::size_t p = 0; p < n; ++p) {
        const double* src = g.data() + p * width * d;
        double* dst = ga.data() + p * d;
        for (std::size_t k = 0; k < width * d; ++k) dst[k] += src[k];
      }
    });
  }

  // Column-wise max over rows; the gradient routes to the first arg-max.
  Var max_pool_rows(Var a) {
    const Tensor& av = value(a);
    require_shape(av.rows() >= 1, "max_pool_rows of empty tensor");
    Tensor out(1, av.cols());
    std::vector<std::size_t> arg(av.cols(), 0);
    for (std::size_t j = 0; j < av.cols(); ++j) {
      double best = av(0, j);
      for (std::size_t i = 1; i < av.rows(); ++i) {
        if (av(i, j) > best) {
          best = av(i, j);
          arg[j] = i;
        }
      }
      out(0, j) = best;
    }
    return push(std::move(out), needs(a),
                [a, arg = std::move(arg)](Tape& t, std::size_t self) {
                  const Tensor& g = t.nodes_[self].grad;
                  Tensor& ga = t.grad_of(a);
                  for (std::size_t j = 0; j < arg.size(); ++j) ga(arg[j], j) += g(0, j);
                });
  }

  // Row-wise softmax.
  Var softmax_rows(Var a) {
    Tensor out = value(a);
    for (std::size_t r = 0; r < out.rows(); ++r) {
      auto row = out.row_span(r);
      double mx = -std::numeric_limits<double>::infinity();
      for (double v : row) mx = std::max(mx, v);
      double s = 0.0;
      for (double& v : row) {
        v = std::exp(v - mx);
        s += v;
      }
      for (double& v : row) v /= s;
    }
    return push(std::move(out), needs(a), [a](Tape& t, std::size_t self) {
      const Tensor& y = t.nodes_[self].value;
      const Tensor& g = t.nodes_[self].grad;
      Tensor& ga = t.grad_of(a);
      for (std::size_t r = 0; r < y.rows(); ++r) {
        auto yr = y.row_span(r);
        auto gr = g.row_span(r);
        const double inner = dot(yr, gr);
        auto gar = ga.row_span(r);
        for (std::size_t j = 0; j < yr.size(); ++j) gar[j] += yr[j] * (gr[j] - inner);
      }
    });
  }

  // -log softmax(logits)_target for a single row of logits; returns 1x1.
  Var cross_entropy(Var logits, std::size_t target) {
    const Tensor& lv = value(logits);
    require_shape(lv.rows() == 1 && target < lv.cols(), "cross_entropy target");
    double mx = -std::numeric_limits<double>::infinity();
    for (double v : lv.values()) mx = std::max(mx, v);
    double s = 0.0;
    for (double v : lv.values()) s += std::exp(v - mx);
    const double lse = mx + std::log(s);
    Tensor out(1, 1, lse - lv[target]);
    return push(std::move(out), needs(logits),
                [logits, target, lse](Tape& t, std::size_t self) {
                  const double g = t.nodes_[self].grad[0];
                  const Tensor& lv2 = t.value(logits);
                  Tensor& gl = t.grad_of(logits);
                  for (std::size_t j = 0; j < lv2.size(); ++j) {
                    gl[j] += g * std::exp(lv2[j] - lse);
                  }
                  gl[target] -= g;
                });
  }

  // Σ of 1x1 scalars.
  Var sum_scalars(std::span<const Var> xs) {
    double s = 0.0;
    bool ng = false;
    for (Var x : xs) {
      require_shape(value(x).size() == 1, "sum_scalars expects 1x1 inputs");
      s += value(x)[0];
      ng = ng || wants(x);
    }
    std::vector<Var> copy(xs.begin(), xs.end());
    return push(Tensor(1, 1, s), ng, [copy = std::move(copy)](Tape& t, std::size_t self) {
      const double g = t.nodes_[self].grad[0];
      for (Var x : copy) {
        if (t.wants(x)) t.grad_of(x)[0] += g;
      }
    });
  }

  // Seeds d(root)/d(root) = 1 and propagates to every parameter leaf.
  void backward(Var root) {
    if (!record_) {
      throw Error(ErrorKind::kInvalidArgument, "backward on a non-recording tape");
    }
    require_shape(value(root).size() == 1, "backward root must be a scalar");
    grad_of(root)[0] += 1.0;
    for (std::size_t i = root.id_ + 1; i-- > 0;) {
      Node& n = nodes_[i];
      if (!n.needs_grad || n.grad.empty() || !n.backward) continue;
      n.backward(*this, i);
    }
  }

 private:
  friend class Var;
  using Backward = std::function<void(Tape&, std::size_t)>;

  struct Node {
    Tensor value;
    Tensor grad;
    bool needs_grad = false;
    Backward backward;
  };

  static void add_into(Tensor& dst, const Tensor& src, double s = 1.0) {
    for (std::size_t i = 0; i < dst.size(); ++i) dst[i] += s * src[i];
  }

  static Tensor gather_rows(const Tensor& table, std::span<const std::int32_t> rows) {
    const std::size_t c = table.cols();
    Tensor out(rows.size(), c);
    for (std::size_t r = 0; r < rows.size(); ++r) {
      if (rows[r] < 0) continue;
      if (static_cast<std::size_t>(rows[r]) >= table.rows()) {
        throw Error(ErrorKind::kInvalidArgument, "gather row out of range");
      }
      std::copy_n(table.data() + rows[r] * c, c, out.data() + r * c);
    }
    return out;
  }

  bool wants(Var v) const { return record_ && nodes_[v.id_].needs_grad; }
  bool needs(Var a) const { return wants(a); }
  bool needs(Var a, Var b) const { return wants(a) || wants(b); }

  Tensor& grad_of(Var v) {
    Node& n = nodes_[v.id_];
    if (n.grad.empty() && !n.value.empty()) {
      n.grad = Tensor(n.value.rows(), n.value.cols());
    }
    return n.grad;
  }

  Var push(Tensor value, bool needs_grad, Backward bw) {
    if (!value.all_finite()) {
      throw Error(ErrorKind::kDivergence, "non-finite value on tape");
    }
    Node n;
    n.value = std::move(value);
    n.needs_grad = record_ && needs_grad;
    if (n.needs_grad) n.backward = std::move(bw);
    nodes_.push_back(std::move(n));
    return Var(this, nodes_.size() - 1);
  }

  bool record_;
  std::vector<Node> nodes_;
};

inline const Tensor& Var::value() const { return tape_->value(*this); }

}  // namespace bundlegen::numerics
