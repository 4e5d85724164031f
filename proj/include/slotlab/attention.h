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

#ifndef SLOTLAB_ATTENTION_H_
#define SLOTLAB_ATTENTION_H_

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

#include "slotlab/autodiff.h"
#include "slotlab/layers.h"

namespace slotlab {

enum class AttentionVariant {
  kAbstractRel,  // trainable query shared by all positions + relative keys
  kSelfRel,      // per-position query projection + relative keys
  kSelfAbs,      // per-position query, sinusoidal absolute positions, no relative keys
  kNone,         // no attention; the attention output is zero
};

std::string variant_name(AttentionVariant variant);
AttentionVariant parse_variant(const std::string& name);

struct AttentionConfig {
  std::size_t num_heads = 4;
  std::size_t head_size = 128;
  std::size_t d_model = 256;
  std::size_t max_relative_distance = 8;
  double attention_dropout = 0.1;
  AttentionVariant variant = AttentionVariant::kAbstractRel;
  // Unset: masked for abstract_rel only.
  std::optional<bool> mask_current;
  // > 1 blocks the query/key/value/output projections.
  std::size_t num_blocks = 1;

  bool masks_current() const { return mask_current.value_or(variant == AttentionVariant::kAbstractRel); }
  bool uses_relative_keys() const {
    return variant == AttentionVariant::kAbstractRel || variant == AttentionVariant::kSelfRel;
  }
};

// Bucket of the signed distance j - i clipped to [-R, R], shifted to [0, 2R].
std::size_t relative_index(std::size_t i, std::size_t j, std::size_t max_distance);

// [T, d] sinusoidal absolute position encodings.
template <typename Real>
Tensor<Real> sinusoidal_positions(std::size_t length, std::size_t width);

template <typename Real>
struct AttentionResult {
  Var<Real> output;     // [T, d_model]
  Tensor<Real> probs;   // [num_heads, T, T], before attention dropout
};

// Multi-head attention over word embeddings E[T, d_model].
//
// abstract_rel, head h, query position i, key position j:
//   q_h = (a W_Q)_h, the same at every position,
//   score(i, j) = q_h . (K_h e_j + r_h[relative_index(i, j)]) / sqrt(head_size),
//   score(i, i) = -INF when masking the current position.
// A fully masked row yields probability zero everywhere, hence a zero output
// row (all projections are bias free).
template <typename Real>
class AbstractQueryAttention {
 public:
  AbstractQueryAttention(ParameterStore<Real>& store, const std::string& name, const AttentionConfig& config);

  AttentionResult<Real> attend(Tape<Real>& tape, Var<Real> embeddings, bool training, std::uint64_t seed,
                               std::string_view seed_path) const;

  const AttentionConfig& config() const { return config_; }

 private:
  Var<Real> queries(Tape<Real>& tape, Var<Real> inputs, std::size_t length) const;

  AttentionConfig config_;
  Parameter<Real>* abstract_query_ = nullptr;     // [1, d_model]
  Parameter<Real>* relative_keys_ = nullptr;      // [2R + 1, heads * head_size]
  std::optional<AffineLayer<Real>> query_;
  std::optional<AffineLayer<Real>> key_;
  std::optional<AffineLayer<Real>> value_;
  std::optional<AffineLayer<Real>> output_;
};

// out[T, 2R+1] -> [T, T] with out[i][j] = logits[i][relative_index(i, j)].
template <typename Real>
Var<Real> gather_relative(Var<Real> logits, std::size_t max_distance);

// g = sigmoid([A ; E] W + b); out = g * E + (1 - g) * A.
template <typename Real>
class FusionGate {
 public:
  FusionGate(ParameterStore<Real>& store, const std::string& name, std::size_t d_model, std::size_t num_blocks);

  Var<Real> fuse(Tape<Real>& tape, Var<Real> attended, Var<Real> embeddings) const;
  Var<Real> gate_values(Tape<Real>& tape, Var<Real> attended, Var<Real> embeddings) const;

 private:
  AffineLayer<Real> gate_;
};

}  // namespace slotlab

#endif  // SLOTLAB_ATTENTION_H_
