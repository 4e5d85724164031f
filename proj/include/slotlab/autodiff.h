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

#ifndef SLOTLAB_AUTODIFF_H_
#define SLOTLAB_AUTODIFF_H_

#include <cstddef>
#include <deque>
#include <functional>
#include <initializer_list>
#include <optional>
#include <unordered_map>
#include <vector>

#include "slotlab/parameters.h"
#include "slotlab/tensor.h"

namespace slotlab {

template <typename Real>
class Tape;

// Handle to a value recorded on a Tape.
template <typename Real>
class Var {
 public:
  Var() = default;

  Tape<Real>* tape() const { return tape_; }
  std::size_t id() const { return id_; }
  bool valid() const { return tape_ != nullptr; }
  const Tensor<Real>& value() const { return tape_->value(id_); }
  const Shape& shape() const { return value().shape(); }
  bool requires_grad() const { return tape_->requires_grad(id_); }

 private:
  friend class Tape<Real>;
  Var(Tape<Real>* tape, std::size_t id) : tape_(tape), id_(id) {}

  Tape<Real>* tape_ = nullptr;
  std::size_t id_ = 0;
};

// Reverse-mode recording. Nodes are appended in evaluation order, so the
// reverse of that order is a valid topological order for backpropagation.
template <typename Real>
class Tape {
 public:
  // Receives the node's value and gradient; adds into input gradients.
  using BackwardFn = std::function<void(Tape&, const Tensor<Real>& value, const Tensor<Real>& grad)>;

  Tape() = default;
  Tape(const Tape&) = delete;
  Tape& operator=(const Tape&) = delete;

  Var<Real> constant(Tensor<Real> value);
  // One leaf per parameter per tape; repeated calls return the same node.
  Var<Real> parameter(Parameter<Real>& p);
  Var<Real> record(Tensor<Real> value, std::initializer_list<Var<Real>> inputs, BackwardFn backward);
  Var<Real> record(Tensor<Real> value, const std::vector<Var<Real>>& inputs, BackwardFn backward);

  const Tensor<Real>& value(std::size_t id) const;
  bool requires_grad(std::size_t id) const { return nodes_[id].requires_grad; }
  // Zero-initialised on first access.
  Tensor<Real>& grad(std::size_t id);
  Tensor<Real>& grad(Var<Real> v) { return grad(v.id()); }
  bool requires_grad(Var<Real> v) const { return requires_grad(v.id()); }

  // Computes d(loss)/d(node) for every node. Node gradients from an earlier
  // call are discarded first.
  void propagate(Var<Real> loss);
  // Adds parameter-leaf gradients into Parameter::grad.
  void accumulate_parameter_grads();
  // propagate() followed by accumulate_parameter_grads().
  void backward(Var<Real> loss);

  std::size_t num_nodes() const { return nodes_.size(); }

 private:
  struct Node {
    Tensor<Real> value;
    Parameter<Real>* param = nullptr;
    std::optional<Tensor<Real>> grad;
    BackwardFn backward;
    bool requires_grad = false;
  };

  Var<Real> push(Node node);

  // deque: value() references stay valid while nodes are appended.
  std::deque<Node> nodes_;
  std::unordered_map<const Parameter<Real>*, std::size_t> param_nodes_;
};

// ---------------------------------------------------------------------------
// Differentiable operations. Matrix operations treat every leading axis as a
// row axis: a tensor of shape [..., n] is viewed as [size / n, n].

// a[..., m, k] x b[k, n] -> [..., m, n].
template <typename Real>
Var<Real> matmul(Var<Real> a, Var<Real> b);
// a[m, k] x b[n, k]^T -> [m, n].
template <typename Real>
Var<Real> matmul_transposed(Var<Real> a, Var<Real> b);

template <typename Real>
Var<Real> add(Var<Real> a, Var<Real> b);
template <typename Real>
Var<Real> sub(Var<Real> a, Var<Real> b);
template <typename Real>
Var<Real> mul(Var<Real> a, Var<Real> b);
template <typename Real>
Var<Real> scale(Var<Real> x, Real factor);
// x[..., n] + bias[n] broadcast over rows.
template <typename Real>
Var<Real> add_row_vector(Var<Real> x, Var<Real> bias);

template <typename Real>
Var<Real> sigmoid(Var<Real> x);
template <typename Real>
Var<Real> tanh(Var<Real> x);
template <typename Real>
Var<Real> relu(Var<Real> x);

template <typename Real>
Var<Real> concat_cols(const std::vector<Var<Real>>& parts);
template <typename Real>
Var<Real> slice_cols(Var<Real> x, std::size_t start, std::size_t count);
// Rows of table[V, d] selected by ids -> [ids.size(), d].
template <typename Real>
Var<Real> embedding_lookup(Var<Real> table, const std::vector<std::size_t>& ids);
// x[1, d] -> [n, d].
template <typename Real>
Var<Real> repeat_rows(Var<Real> x, std::size_t n);
// Row r is a[r] where keep_a[r], else b[r].
template <typename Real>
Var<Real> select_rows(const std::vector<bool>& keep_a, Var<Real> a, Var<Real> b);
// Elementwise product with a constant tensor (dropout masks).
template <typename Real>
Var<Real> mul_constant(Var<Real> x, const Tensor<Real>& factor);

// x[T, T]: diagonal entries become -INF.
template <typename Real>
Var<Real> mask_diagonal(Var<Real> x);
// Softmax over the last axis. A row whose entries are all -INF is an error
// unless all_masked_ok, in which case it maps to a zero row.
template <typename Real>
Var<Real> softmax_lastdim(Var<Real> x, bool all_masked_ok = false);
// Value-only softmax with the same contract.
template <typename Real>
Tensor<Real> softmax_lastdim(const Tensor<Real>& x, bool all_masked_ok = false);

// Sum of all entries -> scalar.
template <typename Real>
Var<Real> sum(Var<Real> x);

}  // namespace slotlab

#endif  // SLOTLAB_AUTODIFF_H_
