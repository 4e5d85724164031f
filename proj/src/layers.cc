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

#include "slotlab/layers.h"

#include <cmath>
#include <vector>

#include "slotlab/kernels.h"

namespace slotlab {

template <typename Real>
Var<Real> activate(Var<Real> x, Activation activation) {
  switch (activation) {
    case Activation::kNone:
      return x;
    case Activation::kSigmoid:
      return sigmoid(x);
    case Activation::kTanh:
      return tanh(x);
    case Activation::kRelu:
      return relu(x);
  }
  return x;
}

namespace init {

template <typename Real>
Tensor<Real> uniform(Rng& rng, Shape shape, double limit) {
  Tensor<Real> t(std::move(shape));
  for (Real& v : t.data()) v = static_cast<Real>(rng.uniform(-limit, limit));
  return t;
}

template <typename Real>
Tensor<Real> glorot_uniform(Rng& rng, Shape shape, std::size_t fan_in, std::size_t fan_out) {
  return uniform<Real>(rng, std::move(shape), std::sqrt(6.0 / static_cast<double>(fan_in + fan_out)));
}

template <typename Real>
Tensor<Real> orthogonal(Rng& rng, std::size_t rows, std::size_t cols) {
  // Modified Gram-Schmidt over the shorter axis of a Gaussian matrix.
  const bool by_rows = rows <= cols;
  const std::size_t count = by_rows ? rows : cols;
  const std::size_t length = by_rows ? cols : rows;
  std::vector<std::vector<double>> basis(count, std::vector<double>(length));
  for (auto& v : basis) {
    for (double& x : v) x = rng.normal();
  }
  for (std::size_t i = 0; i < count; ++i) {
    for (std::size_t j = 0; j < i; ++j) {
      double dot = 0;
      for (std::size_t t = 0; t < length; ++t) dot += basis[i][t] * basis[j][t];
      for (std::size_t t = 0; t < length; ++t) basis[i][t] -= dot * basis[j][t];
    }
    double norm = 0;
    for (double x : basis[i]) norm += x * x;
    norm = std::sqrt(norm);
    for (double& x : basis[i]) x /= norm;
  }
  Tensor<Real> out({rows, cols});
  for (std::size_t i = 0; i < count; ++i) {
    for (std::size_t t = 0; t < length; ++t) {
      if (by_rows) {
        out.at(i, t) = static_cast<Real>(basis[i][t]);
      } else {
        out.at(t, i) = static_cast<Real>(basis[i][t]);
      }
    }
  }
  return out;
}

}  // namespace init

// ---------------------------------------------------------------------------

template <typename Real>
DenseLayer<Real>::DenseLayer(ParameterStore<Real>& store, const std::string& name, std::size_t in_dim,
                             std::size_t out_dim, Activation activation, bool use_bias)
    : in_dim_(in_dim), out_dim_(out_dim), activation_(activation) {
  if (in_dim == 0 || out_dim == 0) throw ConfigError("dense layer '" + name + "' needs positive dimensions");
  Rng rng = store.init_rng(name + ".kernel");
  kernel_ = &store.add(name + ".kernel", init::glorot_uniform<Real>(rng, {in_dim, out_dim}, in_dim, out_dim));
  if (use_bias) bias_ = &store.add(name + ".bias", Tensor<Real>::zeros({out_dim}), /*decay=*/false);
}

template <typename Real>
Var<Real> DenseLayer<Real>::forward(Tape<Real>& tape, Var<Real> x) const {
  if (x.value().cols() != in_dim_) {
    throw DimensionError("dense layer '" + kernel_->name + "': input " + shape_string(x.shape()) +
                         " does not end in " + std::to_string(in_dim_));
  }
  Var<Real> y = matmul(x, tape.parameter(*kernel_));
  if (bias_) y = add_row_vector(y, tape.parameter(*bias_));
  return activate(y, activation_);
}

template <typename Real>
BlockDiagonalDenseLayer<Real>::BlockDiagonalDenseLayer(ParameterStore<Real>& store, const std::string& name,
                                                       std::size_t in_dim, std::size_t out_dim,
                                                       std::size_t num_blocks, Activation activation,
                                                       bool use_bias)
    : in_dim_(in_dim), out_dim_(out_dim), num_blocks_(num_blocks), activation_(activation) {
  if (num_blocks == 0 || in_dim == 0 || out_dim == 0 || in_dim % num_blocks || out_dim % num_blocks) {
    throw ConfigError("block-diagonal layer '" + name + "': dimensions " + std::to_string(in_dim) + "x" +
                      std::to_string(out_dim) + " are not divisible into " + std::to_string(num_blocks) +
                      " blocks");
  }
  const std::size_t bi = in_dim / num_blocks, bo = out_dim / num_blocks;
  Rng rng = store.init_rng(name + ".kernel");
  kernel_ = &store.add(name + ".kernel", init::glorot_uniform<Real>(rng, {num_blocks, bi, bo}, bi, bo));
  if (use_bias) bias_ = &store.add(name + ".bias", Tensor<Real>::zeros({out_dim}), /*decay=*/false);
}

template <typename Real>
Var<Real> BlockDiagonalDenseLayer<Real>::forward(Tape<Real>& tape, Var<Real> x) const {
  if (x.value().cols() != in_dim_) {
    throw DimensionError("block-diagonal layer '" + kernel_->name + "': input " + shape_string(x.shape()) +
                         " does not end in " + std::to_string(in_dim_));
  }
  Var<Real> y = block_diagonal_matmul(x, tape.parameter(*kernel_));
  if (bias_) y = add_row_vector(y, tape.parameter(*bias_));
  return activate(y, activation_);
}

template <typename Real>
Tensor<Real> BlockDiagonalDenseLayer<Real>::expanded_kernel() const {
  const std::size_t bi = in_dim_ / num_blocks_, bo = out_dim_ / num_blocks_;
  Tensor<Real> full({in_dim_, out_dim_});
  const Tensor<Real>& blocks = kernel_->value;
  for (std::size_t b = 0; b < num_blocks_; ++b) {
    for (std::size_t i = 0; i < bi; ++i) {
      for (std::size_t j = 0; j < bo; ++j) full.at(b * bi + i, b * bo + j) = blocks[(b * bi + i) * bo + j];
    }
  }
  return full;
}

template <typename Real>
Var<Real> block_diagonal_matmul(Var<Real> x, Var<Real> kernel) {
  const Tensor<Real>& xv = x.value();
  const Tensor<Real>& kv = kernel.value();
  if (kv.rank() != 3 || xv.cols() != kv.dim(0) * kv.dim(1)) {
    throw DimensionError("block_diagonal_matmul: input " + shape_string(xv.shape()) + " does not match blocks " +
                         shape_string(kv.shape()));
  }
  const std::size_t k = kv.dim(0), bi = kv.dim(1), bo = kv.dim(2);
  const std::size_t m = xv.rows(), in = k * bi, out_cols = k * bo;
  Shape out_shape = xv.shape();
  out_shape.back() = out_cols;
  Tensor<Real> out(out_shape);
  for (std::size_t b = 0; b < k; ++b) {
    gemm_strided<Real>(false, false, m, bo, bi, xv.raw() + b * bi, in, kv.raw() + b * bi * bo, bo,
                       out.raw() + b * bo, out_cols, false);
  }
  const std::size_t ix = x.id(), ik = kernel.id();
  return x.tape()->record(std::move(out), {x, kernel}, [=](Tape<Real>& t, const Tensor<Real>&, const Tensor<Real>& g) {
    const Real* xr = t.value(ix).raw();
    const Real* kr = t.value(ik).raw();
    for (std::size_t b = 0; b < k; ++b) {
      if (t.requires_grad(ix)) {
        gemm_strided<Real>(false, true, m, bi, bo, g.raw() + b * bo, out_cols, kr + b * bi * bo, bo,
                           t.grad(ix).raw() + b * bi, in, true);
      }
      if (t.requires_grad(ik)) {
        gemm_strided<Real>(true, false, bi, bo, m, xr + b * bi, in, g.raw() + b * bo, out_cols,
                           t.grad(ik).raw() + b * bi * bo, bo, true);
      }
    }
  });
}

template <typename Real>
AffineLayer<Real>::AffineLayer(ParameterStore<Real>& store, const std::string& name, std::size_t in_dim,
                               std::size_t out_dim, std::size_t num_blocks, Activation activation, bool use_bias)
    : layer_(num_blocks <= 1
                 ? std::variant<DenseLayer<Real>, BlockDiagonalDenseLayer<Real>>(
                       std::in_place_type<DenseLayer<Real>>, store, name, in_dim, out_dim, activation, use_bias)
                 : std::variant<DenseLayer<Real>, BlockDiagonalDenseLayer<Real>>(
                       std::in_place_type<BlockDiagonalDenseLayer<Real>>, store, name, in_dim, out_dim,
                       num_blocks, activation, use_bias)) {}

template <typename Real>
Var<Real> dropout(Var<Real> x, double rate, bool training, std::uint64_t seed, std::string_view seed_path) {
  if (!(rate >= 0.0 && rate < 1.0)) {
    throw ConfigError("dropout rate must lie in [0, 1), got " + std::to_string(rate));
  }
  if (!training || rate == 0.0) return x;
  Rng rng(derive_seed(seed, seed_path));
  Tensor<Real> mask(x.shape());
  const Real keep_scale = static_cast<Real>(1.0 / (1.0 - rate));
  for (Real& m : mask.data()) m = rng.uniform() >= rate ? keep_scale : Real{0};
  return mul_constant(x, mask);
}

#define SLOTLAB_INSTANTIATE_LAYERS(Real)                                                           \
  template Var<Real> activate(Var<Real>, Activation);                                              \
  template Tensor<Real> init::uniform<Real>(Rng&, Shape, double);                                  \
  template Tensor<Real> init::glorot_uniform<Real>(Rng&, Shape, std::size_t, std::size_t);         \
  template Tensor<Real> init::orthogonal<Real>(Rng&, std::size_t, std::size_t);                    \
  template class DenseLayer<Real>;                                                                 \
  template class BlockDiagonalDenseLayer<Real>;                                                    \
  template class AffineLayer<Real>;                                                                \
  template Var<Real> block_diagonal_matmul(Var<Real>, Var<Real>);                                  \
  template Var<Real> dropout(Var<Real>, double, bool, std::uint64_t, std::string_view);

SLOTLAB_INSTANTIATE_LAYERS(float)
SLOTLAB_INSTANTIATE_LAYERS(double)

}  // namespace slotlab
