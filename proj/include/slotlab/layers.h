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

#ifndef SLOTLAB_LAYERS_H_
#define SLOTLAB_LAYERS_H_

#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>
#include <variant>

#include "slotlab/autodiff.h"
#include "slotlab/parameters.h"
#include "slotlab/rng.h"

namespace slotlab {

enum class Activation { kNone, kSigmoid, kTanh, kRelu };

template <typename Real>
Var<Real> activate(Var<Real> x, Activation activation);

namespace init {

// U(-limit, limit) with limit = sqrt(6 / (fan_in + fan_out)).
template <typename Real>
Tensor<Real> glorot_uniform(Rng& rng, Shape shape, std::size_t fan_in, std::size_t fan_out);
template <typename Real>
Tensor<Real> uniform(Rng& rng, Shape shape, double limit);
// [rows, cols] with orthonormal rows (rows <= cols) or columns (rows > cols).
template <typename Real>
Tensor<Real> orthogonal(Rng& rng, std::size_t rows, std::size_t cols);

}  // namespace init

// activation(x * kernel + bias); kernel [in_dim, out_dim].
template <typename Real>
class DenseLayer {
 public:
  DenseLayer(ParameterStore<Real>& store, const std::string& name, std::size_t in_dim, std::size_t out_dim,
             Activation activation, bool use_bias = true);

  Var<Real> forward(Tape<Real>& tape, Var<Real> x) const;

  std::size_t in_dim() const { return in_dim_; }
  std::size_t out_dim() const { return out_dim_; }
  Activation activation() const { return activation_; }
  Parameter<Real>& kernel() const { return *kernel_; }
  Parameter<Real>* bias() const { return bias_; }
  std::size_t param_count() const { return in_dim_ * out_dim_ + (bias_ ? out_dim_ : 0); }

 private:
  std::size_t in_dim_;
  std::size_t out_dim_;
  Activation activation_;
  Parameter<Real>* kernel_;
  Parameter<Real>* bias_ = nullptr;
};

// Affine layer whose kernel is block diagonal with num_blocks equal blocks.
// Only the blocks are stored: kernel [num_blocks, in_dim / k, out_dim / k].
// Input features are split into k contiguous chunks; block b maps chunk b to
// output columns [b * out_dim / k, (b + 1) * out_dim / k).
template <typename Real>
class BlockDiagonalDenseLayer {
 public:
  // Throws ConfigError unless both dimensions are divisible by num_blocks.
  BlockDiagonalDenseLayer(ParameterStore<Real>& store, const std::string& name, std::size_t in_dim,
                          std::size_t out_dim, std::size_t num_blocks, Activation activation, bool use_bias = true);

  Var<Real> forward(Tape<Real>& tape, Var<Real> x) const;

  std::size_t in_dim() const { return in_dim_; }
  std::size_t out_dim() const { return out_dim_; }
  std::size_t num_blocks() const { return num_blocks_; }
  Activation activation() const { return activation_; }
  Parameter<Real>& kernel() const { return *kernel_; }
  Parameter<Real>* bias() const { return bias_; }
  std::size_t param_count() const { return in_dim_ * out_dim_ / num_blocks_ + (bias_ ? out_dim_ : 0); }

  // The equivalent full [in_dim, out_dim] kernel with zeros off the blocks.
  Tensor<Real> expanded_kernel() const;

 private:
  std::size_t in_dim_;
  std::size_t out_dim_;
  std::size_t num_blocks_;
  Activation activation_;
  Parameter<Real>* kernel_;
  Parameter<Real>* bias_ = nullptr;
};

// x[..., in] times stored blocks kernel[k, in/k, out/k] -> [..., out].
template <typename Real>
Var<Real> block_diagonal_matmul(Var<Real> x, Var<Real> kernel);

// Either layer kind, chosen by configuration.
template <typename Real>
class AffineLayer {
 public:
  // num_blocks <= 1 builds a DenseLayer.
  AffineLayer(ParameterStore<Real>& store, const std::string& name, std::size_t in_dim, std::size_t out_dim,
              std::size_t num_blocks, Activation activation, bool use_bias = true);

  Var<Real> forward(Tape<Real>& tape, Var<Real> x) const {
    return std::visit([&](const auto& layer) { return layer.forward(tape, x); }, layer_);
  }
  std::size_t param_count() const {
    return std::visit([](const auto& layer) { return layer.param_count(); }, layer_);
  }
  bool blocked() const { return std::holds_alternative<BlockDiagonalDenseLayer<Real>>(layer_); }

 private:
  std::variant<DenseLayer<Real>, BlockDiagonalDenseLayer<Real>> layer_;
};

// Inverted dropout. Identity when !training or rate == 0. The keep mask is
// drawn from the stream derive_seed(seed, seed_path). Throws ConfigError
// unless 0 <= rate < 1.
template <typename Real>
Var<Real> dropout(Var<Real> x, double rate, bool training, std::uint64_t seed, std::string_view seed_path);

}  // namespace slotlab

#endif  // SLOTLAB_LAYERS_H_
