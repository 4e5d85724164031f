// Copyright 2026 The Slotlab Authors
// SPDX-License-Identifier: Apache-2.0
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "slotlab/autodiff.h"

#include <algorithm>
#include <cmath>
#include <limits>

#include "slotlab/kernels.h"

namespace slotlab {

// ---------------------------------------------------------------------------
// Tape

template <typename Real>
Var<Real> Tape<Real>::push(Node node) {
  nodes_.push_back(std::move(node));
  return Var<Real>(this, nodes_.size() - 1);
}

template <typename Real>
Var<Real> Tape<Real>::constant(Tensor<Real> value) {
  Node n;
  n.value = std::move(value);
  return push(std::move(n));
}

template <typename Real>
Var<Real> Tape<Real>::parameter(Parameter<Real>& p) {
  if (auto it = param_nodes_.find(&p); it != param_nodes_.end()) return Var<Real>(this, it->second);
  Node n;
  n.param = &p;
  n.requires_grad = true;
  Var<Real> v = push(std::move(n));
  param_nodes_.emplace(&p, v.id());
  return v;
}

template <typename Real>
Var<Real> Tape<Real>::record(Tensor<Real> value, std::initializer_list<Var<Real>> inputs,
                             BackwardFn backward) {
  Node n;
  n.value = std::move(value);
  for (const Var<Real>& in : inputs) {
    if (in.tape() != this) throw ContractError("operands recorded on different tapes");
    n.requires_grad = n.requires_grad || nodes_[in.id()].requires_grad;
  }
  if (n.requires_grad) n.backward = std::move(backward);
  return push(std::move(n));
}

template <typename Real>
Var<Real> Tape<Real>::record(Tensor<Real> value, const std::vector<Var<Real>>& inputs, BackwardFn backward) {
  Node n;
  n.value = std::move(value);
  for (const Var<Real>& in : inputs) {
    if (in.tape() != this) throw ContractError("operands recorded on different tapes");
    n.requires_grad = n.requires_grad || nodes_[in.id()].requires_grad;
  }
  if (n.requires_grad) n.backward = std::move(backward);
  return push(std::move(n));
}

template <typename Real>
const Tensor<Real>& Tape<Real>::value(std::size_t id) const {
  const Node& n = nodes_[id];
  return n.param ? n.param->value : n.value;
}

template <typename Real>
Tensor<Real>& Tape<Real>::grad(std::size_t id) {
  Node& n = nodes_[id];
  if (!n.grad) n.grad = Tensor<Real>::zeros(value(id).shape());
  return *n.grad;
}

template <typename Real>
void Tape<Real>::propagate(Var<Real> loss) {
  if (loss.tape() != this) throw ContractError("loss belongs to a different tape");
  if (value(loss.id()).size() != 1) {
    throw ContractError("backward() needs a scalar loss, got shape " + shape_string(value(loss.id()).shape()));
  }
  for (Node& n : nodes_) n.grad.reset();
  grad(loss.id()).fill(Real{1});
  for (std::size_t id = loss.id() + 1; id-- > 0;) {
    Node& n = nodes_[id];
    if (!n.grad || !n.backward) continue;
    n.backward(*this, value(id), *n.grad);
  }
}

template <typename Real>
void Tape<Real>::accumulate_parameter_grads() {
  for (Node& n : nodes_) {
    if (!n.param || !n.grad) continue;
    auto dst = n.param->grad.data();
    auto src = n.grad->data();
    for (std::size_t i = 0; i < dst.size(); ++i) dst[i] += src[i];
  }
}

template <typename Real>
void Tape<Real>::backward(Var<Real> loss) {
  propagate(loss);
  accumulate_parameter_grads();
}

// ---------------------------------------------------------------------------
// Operations

namespace {

template <typename Real>
void require_same_shape(const char* op, Var<Real> a, Var<Real> b) {
  if (a.shape() != b.shape()) {
    throw DimensionError(std::string(op) + ": shape mismatch " + shape_string(a.shape()) + " vs " +
                         shape_string(b.shape()));
  }
}

template <typename Real>
void add_into(Tensor<Real>& dst, const Tensor<Real>& src) {
  Real* d = dst.raw();
  const Real* s = src.raw();
  for (std::size_t i = 0, n = dst.size(); i < n; ++i) d[i] += s[i];
}

template <typename Real, typename F>
Tensor<Real> map(const Tensor<Real>& x, F f) {
  Tensor<Real> out(x.shape());
  const Real* in = x.raw();
  Real* o = out.raw();
  for (std::size_t i = 0, n = x.size(); i < n; ++i) o[i] = f(in[i]);
  return out;
}

}  // namespace

template <typename Real>
Var<Real> matmul(Var<Real> a, Var<Real> b) {
  const Tensor<Real>& av = a.value();
  const Tensor<Real>& bv = b.value();
  if (bv.rank() != 2 || av.cols() != bv.dim(0)) {
    throw DimensionError("matmul: inner dimensions disagree for " + shape_string(av.shape()) + " x " +
                         shape_string(bv.shape()));
  }
  const std::size_t m = av.rows(), k = av.cols(), n = bv.dim(1);
  Shape out_shape = av.shape();
  out_shape.back() = n;
  Tensor<Real> out(out_shape);
  gemm<Real>(false, false, m, n, k, av.raw(), bv.raw(), out.raw(), false);
  const std::size_t ia = a.id(), ib = b.id();
  return a.tape()->record(std::move(out), {a, b}, [ia, ib, m, n, k](Tape<Real>& t, const Tensor<Real>&,
                                                                     const Tensor<Real>& g) {
    if (t.requires_grad(ia)) gemm<Real>(false, true, m, k, n, g.raw(), t.value(ib).raw(), t.grad(ia).raw(), true);
    if (t.requires_grad(ib)) gemm<Real>(true, false, k, n, m, t.value(ia).raw(), g.raw(), t.grad(ib).raw(), true);
  });
}

template <typename Real>
Var<Real> matmul_transposed(Var<Real> a, Var<Real> b) {
  const Tensor<Real>& av = a.value();
  const Tensor<Real>& bv = b.value();
  if (av.rank() != 2 || bv.rank() != 2 || av.dim(1) != bv.dim(1)) {
    throw DimensionError("matmul_transposed: shapes " + shape_string(av.shape()) + " and " +
                         shape_string(bv.shape()) + " do not share a column dimension");
  }
  const std::size_t m = av.dim(0), k = av.dim(1), n = bv.dim(0);
  Tensor<Real> out({m, n});
  gemm<Real>(false, true, m, n, k, av.raw(), bv.raw(), out.raw(), false);
  const std::size_t ia = a.id(), ib = b.id();
  return a.tape()->record(std::move(out), {a, b}, [ia, ib, m, n, k](Tape<Real>& t, const Tensor<Real>&,
                                                                     const Tensor<Real>& g) {
    if (t.requires_grad(ia)) gemm<Real>(false, false, m, k, n, g.raw(), t.value(ib).raw(), t.grad(ia).raw(), true);
    if (t.requires_grad(ib)) gemm<Real>(true, false, n, k, m, g.raw(), t.value(ia).raw(), t.grad(ib).raw(), true);
  });
}

template <typename Real>
Var<Real> add(Var<Real> a, Var<Real> b) {
  require_same_shape("add", a, b);
  Tensor<Real> out = a.value();
  add_into(out, b.value());
  const std::size_t ia = a.id(), ib = b.id();
  return a.tape()->record(std::move(out), {a, b}, [ia, ib](Tape<Real>& t, const Tensor<Real>&,
                                                           const Tensor<Real>& g) {
    if (t.requires_grad(ia)) add_into(t.grad(ia), g);
    if (t.requires_grad(ib)) add_into(t.grad(ib), g);
  });
}

template <typename Real>
Var<Real> sub(Var<Real> a, Var<Real> b) {
  require_same_shape("sub", a, b);
  Tensor<Real> out = a.value();
  const Real* bv = b.value().raw();
  Real* o = out.raw();
  for (std::size_t i = 0; i < out.size(); ++i) o[i] -= bv[i];
  const std::size_t ia = a.id(), ib = b.id();
  return a.tape()->record(std::move(out), {a, b}, [ia, ib](Tape<Real>& t, const Tensor<Real>&,
                                                           const Tensor<Real>& g) {
    if (t.requires_grad(ia)) add_into(t.grad(ia), g);
    if (t.requires_grad(ib)) {
      Real* d = t.grad(ib).raw();
      for (std::size_t i = 0; i < g.size(); ++i) d[i] -= g[i];
    }
  });
}

template <typename Real>
Var<Real> mul(Var<Real> a, Var<Real> b) {
  require_same_shape("mul", a, b);
  Tensor<Real> out = a.value();
  const Real* bv = b.value().raw();
  Real* o = out.raw();
  for (std::size_t i = 0; i < out.size(); ++i) o[i] *= bv[i];
  const std::size_t ia = a.id(), ib = b.id();
  return a.tape()->record(std::move(out), {a, b}, [ia, ib](Tape<Real>& t, const Tensor<Real>&,
                                                           const Tensor<Real>& g) {
    if (t.requires_grad(ia)) {
      Real* d = t.grad(ia).raw();
      const Real* other = t.value(ib).raw();
      for (std::size_t i = 0; i < g.size(); ++i) d[i] += g[i] * other[i];
    }
    if (t.requires_grad(ib)) {
      Real* d = t.grad(ib).raw();
      const Real* other = t.value(ia).raw();
      for (std::size_t i = 0; i < g.size(); ++i) d[i] += g[i] * other[i];
    }
  });
}

template <typename Real>
Var<Real> scale(Var<Real> x, Real factor) {
  Tensor<Real> out = map(x.value(), [factor](Real v) { return v * factor; });
  const std::size_t ix = x.id();
  return x.tape()->record(std::move(out), {x}, [ix, factor](Tape<Real>& t, const Tensor<Real>&,
                                                            const Tensor<Real>& g) {
    Real* d = t.grad(ix).raw();
    for (std::size_t i = 0; i < g.size(); ++i) d[i] += g[i] * factor;
  });
}

template <typename Real>
Var<Real> add_row_vector(Var<Real> x, Var<Real> bias) {
  const Tensor<Real>& xv = x.value();
  const Tensor<Real>& bv = bias.value();
  if (bv.rank() != 1 || bv.dim(0) != xv.cols()) {
    throw DimensionError("add_row_vector: bias " + shape_string(bv.shape()) + " does not match " +
                         shape_string(xv.shape()));
  }
  Tensor<Real> out = xv;
  const std::size_t rows = xv.rows(), cols = xv.cols();
  for (std::size_t r = 0; r < rows; ++r) {
    Real* o = out.raw() + r * cols;
    for (std::size_t c = 0; c < cols; ++c) o[c] += bv[c];
  }
  const std::size_t ix = x.id(), ib = bias.id();
  return x.tape()->record(std::move(out), {x, bias}, [ix, ib, rows, cols](Tape<Real>& t, const Tensor<Real>&,
                                                                          const Tensor<Real>& g) {
    if (t.requires_grad(ix)) add_into(t.grad(ix), g);
    if (t.requires_grad(ib)) {
      Real* d = t.grad(ib).raw();
      for (std::size_t r = 0; r < rows; ++r) {
        const Real* gr = g.raw() + r * cols;
        for (std::size_t c = 0; c < cols; ++c) d[c] += gr[c];
      }
    }
  });
}

template <typename Real>
Var<Real> sigmoid(Var<Real> x) {
  Tensor<Real> out = map(x.value(), [](Real v) { return Real{1} / (Real{1} + std::exp(-v)); });
  const std::size_t ix = x.id();
  return x.tape()->record(std::move(out), {x}, [ix](Tape<Real>& t, const Tensor<Real>& y, const Tensor<Real>& g) {
    Real* d = t.grad(ix).raw();
    for (std::size_t i = 0; i < g.size(); ++i) d[i] += g[i] * y[i] * (Real{1} - y[i]);
  });
}

template <typename Real>
Var<Real> tanh(Var<Real> x) {
  Tensor<Real> out = map(x.value(), [](Real v) { return std::tanh(v); });
  const std::size_t ix = x.id();
  return x.tape()->record(std::move(out), {x}, [ix](Tape<Real>& t, const Tensor<Real>& y, const Tensor<Real>& g) {
    Real* d = t.grad(ix).raw();
    for (std::size_t i = 0; i < g.size(); ++i) d[i] += g[i] * (Real{1} - y[i] * y[i]);
  });
}

template <typename Real>
Var<Real> relu(Var<Real> x) {
  Tensor<Real> out = map(x.value(), [](Real v) { return v > Real{0} ? v : Real{0}; });
  const std::size_t ix = x.id();
  return x.tape()->record(std::move(out), {x}, [ix](Tape<Real>& t, const Tensor<Real>& y, const Tensor<Real>& g) {
    Real* d = t.grad(ix).raw();
    for (std::size_t i = 0; i < g.size(); ++i) {
      if (y[i] > Real{0}) d[i] += g[i];
    }
  });
}

template <typename Real>
Var<Real> concat_cols(const std::vector<Var<Real>>& parts) {
  if (parts.empty()) throw ContractError("concat_cols: no inputs");
  const std::size_t rows = parts[0].value().rows();
  std::vector<std::size_t> widths;
  std::size_t total = 0;
  for (const auto& p : parts) {
    if (p.value().rows() != rows) {
      throw DimensionError("concat_cols: row count mismatch " + shape_string(parts[0].shape()) + " vs " +
                           shape_string(p.shape()));
    }
    widths.push_back(p.value().cols());
    total += widths.back();
  }
  Shape out_shape = parts[0].shape();
  out_shape.back() = total;
  Tensor<Real> out(out_shape);
  std::size_t offset = 0;
  for (std::size_t k = 0; k < parts.size(); ++k) {
    const Tensor<Real>& v = parts[k].value();
    for (std::size_t r = 0; r < rows; ++r) {
      std::copy_n(v.raw() + r * widths[k], widths[k], out.raw() + r * total + offset);
    }
    offset += widths[k];
  }
  std::vector<std::size_t> ids;
  for (const auto& p : parts) ids.push_back(p.id());
  return parts[0].tape()->record(
      std::move(out), parts, [ids, widths, rows, total](Tape<Real>& t, const Tensor<Real>&, const Tensor<Real>& g) {
        std::size_t offset = 0;
        for (std::size_t k = 0; k < ids.size(); ++k) {
          if (t.requires_grad(ids[k])) {
            Real* d = t.grad(ids[k]).raw();
            for (std::size_t r = 0; r < rows; ++r) {
              const Real* gr = g.raw() + r * total + offset;
              Real* dr = d + r * widths[k];
              for (std::size_t c = 0; c < widths[k]; ++c) dr[c] += gr[c];
            }
          }
          offset += widths[k];
        }
      });
}

template <typename Real>
Var<Real> slice_cols(Var<Real> x, std::size_t start, std::size_t count) {
  const Tensor<Real>& xv = x.value();
  const std::size_t cols = xv.cols(), rows = xv.rows();
  if (count == 0 || start + count > cols) {
    throw DimensionError("slice_cols: [" + std::to_string(start) + ", " + std::to_string(start + count) +
                         ") out of range for " + shape_string(xv.shape()));
  }
  Shape out_shape = xv.shape();
  out_shape.back() = count;
  Tensor<Real> out(out_shape);
  for (std::size_t r = 0; r < rows; ++r) std::copy_n(xv.raw() + r * cols + start, count, out.raw() + r * count);
  const std::size_t ix = x.id();
  return x.tape()->record(std::move(out), {x}, [ix, start, count, rows, cols](Tape<Real>& t, const Tensor<Real>&,
                                                                              const Tensor<Real>& g) {
    Real* d = t.grad(ix).raw();
    for (std::size_t r = 0; r < rows; ++r) {
      const Real* gr = g.raw() + r * count;
      Real* dr = d + r * cols + start;
      for (std::size_t c = 0; c < count; ++c) dr[c] += gr[c];
    }
  });
}

template <typename Real>
Var<Real> embedding_lookup(Var<Real> table, const std::vector<std::size_t>& ids) {
  const Tensor<Real>& tv = table.value();
  if (tv.rank() != 2) throw DimensionError("embedding_lookup: table must be 2-D, got " + shape_string(tv.shape()));
  if (ids.empty()) throw ContractError("embedding_lookup: empty id list");
  const std::size_t width = tv.dim(1);
  Tensor<Real> out({ids.size(), width});
  for (std::size_t r = 0; r < ids.size(); ++r) {
    if (ids[r] >= tv.dim(0)) {
      throw ContractError("embedding_lookup: id " + std::to_string(ids[r]) + " outside table of " +
                          std::to_string(tv.dim(0)) + " rows");
    }
    std::copy_n(tv.raw() + ids[r] * width, width, out.raw() + r * width);
  }
  const std::size_t it = table.id();
  return table.tape()->record(std::move(out), {table}, [it, ids, width](Tape<Real>& t, const Tensor<Real>&,
                                                                        const Tensor<Real>& g) {
    Real* d = t.grad(it).raw();
    for (std::size_t r = 0; r < ids.size(); ++r) {
      const Real* gr = g.raw() + r * width;
      Real* dr = d + ids[r] * width;
      for (std::size_t c = 0; c < width; ++c) dr[c] += gr[c];
    }
  });
}

template <typename Real>
Var<Real> repeat_rows(Var<Real> x, std::size_t n) {
  const Tensor<Real>& xv = x.value();
  if (xv.rank() != 2 || xv.dim(0) != 1 || n == 0) {
    throw DimensionError("repeat_rows: expected [1, d] input and n > 0, got " + shape_string(xv.shape()));
  }
  const std::size_t width = xv.dim(1);
  Tensor<Real> out({n, width});
  for (std::size_t r = 0; r < n; ++r) std::copy_n(xv.raw(), width, out.raw() + r * width);
  const std::size_t ix = x.id();
  return x.tape()->record(std::move(out), {x}, [ix, n, width](Tape<Real>& t, const Tensor<Real>&,
                                                              const Tensor<Real>& g) {
    Real* d = t.grad(ix).raw();
    for (std::size_t r = 0; r < n; ++r) {
      const Real* gr = g.raw() + r * width;
      for (std::size_t c = 0; c < width; ++c) d[c] += gr[c];
    }
  });
}

template <typename Real>
Var<Real> select_rows(const std::vector<bool>& keep_a, Var<Real> a, Var<Real> b) {
  require_same_shape("select_rows", a, b);
  const Tensor<Real>& av = a.value();
  if (keep_a.size() != av.rows()) {
    throw DimensionError("select_rows: mask of " + std::to_string(keep_a.size()) + " rows for " +
                         shape_string(av.shape()));
  }
  const std::size_t cols = av.cols();
  Tensor<Real> out = b.value();
  for (std::size_t r = 0; r < keep_a.size(); ++r) {
    if (keep_a[r]) std::copy_n(av.raw() + r * cols, cols, out.raw() + r * cols);
  }
  const std::size_t ia = a.id(), ib = b.id();
  return a.tape()->record(std::move(out), {a, b}, [ia, ib, keep_a, cols](Tape<Real>& t, const Tensor<Real>&,
                                                                         const Tensor<Real>& g) {
    for (std::size_t r = 0; r < keep_a.size(); ++r) {
      const std::size_t target = keep_a[r] ? ia : ib;
      if (!t.requires_grad(target)) continue;
      Real* d = t.grad(target).raw() + r * cols;
      const Real* gr = g.raw() + r * cols;
      for (std::size_t c = 0; c < cols; ++c) d[c] += gr[c];
    }
  });
}

template <typename Real>
Var<Real> mul_constant(Var<Real> x, const Tensor<Real>& factor) {
  if (x.shape() != factor.shape()) {
    throw DimensionError("mul_constant: shape mismatch " + shape_string(x.shape()) + " vs " +
                         shape_string(factor.shape()));
  }
  Tensor<Real> out = x.value();
  for (std::size_t i = 0; i < out.size(); ++i) out[i] *= factor[i];
  const std::size_t ix = x.id();
  return x.tape()->record(std::move(out), {x}, [ix, factor](Tape<Real>& t, const Tensor<Real>&,
                                                            const Tensor<Real>& g) {
    Real* d = t.grad(ix).raw();
    for (std::size_t i = 0; i < g.size(); ++i) d[i] += g[i] * factor[i];
  });
}

template <typename Real>
Var<Real> mask_diagonal(Var<Real> x) {
  const Tensor<Real>& xv = x.value();
  if (xv.rank() != 2 || xv.dim(0) != xv.dim(1)) {
    throw DimensionError("mask_diagonal: expected square matrix, got " + shape_string(xv.shape()));
  }
  const std::size_t n = xv.dim(0);
  Tensor<Real> out = xv;
  for (std::size_t i = 0; i < n; ++i) out.at(i, i) = -std::numeric_limits<Real>::infinity();
  const std::size_t ix = x.id();
  return x.tape()->record(std::move(out), {x}, [ix, n](Tape<Real>& t, const Tensor<Real>&, const Tensor<Real>& g) {
    Tensor<Real>& d = t.grad(ix);
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < n; ++j) {
        if (i != j) d.at(i, j) += g.at(i, j);
      }
    }
  });
}

template <typename Real>
Tensor<Real> softmax_lastdim(const Tensor<Real>& x, bool all_masked_ok) {
  Tensor<Real> out(x.shape());
  const std::size_t rows = x.rows(), cols = x.cols();
  constexpr Real kNegInf = -std::numeric_limits<Real>::infinity();
  for (std::size_t r = 0; r < rows; ++r) {
    const Real* in = x.raw() + r * cols;
    Real* o = out.raw() + r * cols;
    const Real mx = *std::max_element(in, in + cols);
    if (mx == kNegInf) {
      if (!all_masked_ok) {
        throw MaskingError("softmax_lastdim: row " + std::to_string(r) + " is entirely masked");
      }
      std::fill(o, o + cols, Real{0});
      continue;
    }
    Real total = 0;
    for (std::size_t c = 0; c < cols; ++c) {
      o[c] = in[c] == kNegInf ? Real{0} : std::exp(in[c] - mx);
      total += o[c];
    }
    for (std::size_t c = 0; c < cols; ++c) o[c] /= total;
  }
  return out;
}

template <typename Real>
Var<Real> softmax_lastdim(Var<Real> x, bool all_masked_ok) {
  Tensor<Real> out = softmax_lastdim(x.value(), all_masked_ok);
  const std::size_t ix = x.id();
  return x.tape()->record(std::move(out), {x}, [ix](Tape<Real>& t, const Tensor<Real>& y, const Tensor<Real>& g) {
    const std::size_t rows = y.rows(), cols = y.cols();
    Real* d = t.grad(ix).raw();
    for (std::size_t r = 0; r < rows; ++r) {
      const Real* yr = y.raw() + r * cols;
      const Real* gr = g.raw() + r * cols;
      Real dot = 0;
      for (std::size_t c = 0; c < cols; ++c) dot += yr[c] * gr[c];
      Real* dr = d + r * cols;
      for (std::size_t c = 0; c < cols; ++c) dr[c] += yr[c] * (gr[c] - dot);
    }
  });
}

template <typename Real>
Var<Real> sum(Var<Real> x) {
  Real total = 0;
  for (Real v : x.value().data()) total += v;
  const std::size_t ix = x.id();
  return x.tape()->record(Tensor<Real>::scalar(total), {x}, [ix](Tape<Real>& t, const Tensor<Real>&,
                                                                 const Tensor<Real>& g) {
    Real* d = t.grad(ix).raw();
    const Real s = g[0];
    for (std::size_t i = 0, n = t.value(ix).size(); i < n; ++i) d[i] += s;
  });
}

#define SLOTLAB_INSTANTIATE_AUTODIFF(Real)                                                   \
  template class Tape<Real>;                                                                 \
  template Var<Real> matmul(Var<Real>, Var<Real>);                                           \
  template Var<Real> matmul_transposed(Var<Real>, Var<Real>);                                \
  template Var<Real> add(Var<Real>, Var<Real>);                                              \
  template Var<Real> sub(Var<Real>, Var<Real>);                                              \
  template Var<Real> mul(Var<Real>, Var<Real>);                                              \
  template Var<Real> scale(Var<Real>, Real);                                                 \
  template Var<Real> add_row_vector(Var<Real>, Var<Real>);                                   \
  template Var<Real> sigmoid(Var<Real>);                                                     \
  template Var<Real> tanh(Var<Real>);                                                        \
  template Var<Real> relu(Var<Real>);                                                        \
  template Var<Real> concat_cols(const std::vector<Var<Real>>&);                             \
  template Var<Real> slice_cols(Var<Real>, std::size_t, std::size_t);                        \
  template Var<Real> embedding_lookup(Var<Real>, const std::vector<std::size_t>&);           \
  template Var<Real> repeat_rows(Var<Real>, std::size_t);                                    \
  template Var<Real> select_rows(const std::vector<bool>&, Var<Real>, Var<Real>);            \
  template Var<Real> mul_constant(Var<Real>, const Tensor<Real>&);                           \
  template Var<Real> mask_diagonal(Var<Real>);                                               \
  template Var<Real> softmax_lastdim(Var<Real>, bool);                                       \
  template Tensor<Real> softmax_lastdim(const Tensor<Real>&, bool);                          \
  template Var<Real> sum(Var<Real>);

SLOTLAB_INSTANTIATE_AUTODIFF(float)
SLOTLAB_INSTANTIATE_AUTODIFF(double)

}  // namespace slotlab
