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

#include "slotlab/attention.h"

#include <algorithm>
#include <cmath>

namespace slotlab {

std::string variant_name(AttentionVariant variant) {
  switch (variant) {
    case AttentionVariant::kAbstractRel:
      return "abstract_rel";
    case AttentionVariant::kSelfRel:
      return "self_rel";
    case AttentionVariant::kSelfAbs:
      return "self_abs";
    case AttentionVariant::kNone:
      return "none";
  }
  return "none";
}

AttentionVariant parse_variant(const std::string& name) {
  if (name == "abstract_rel") return AttentionVariant::kAbstractRel;
  if (name == "self_rel") return AttentionVariant::kSelfRel;
  if (name == "self_abs") return AttentionVariant::kSelfAbs;
  if (name == "none" || name == "crf_only") return AttentionVariant::kNone;
  throw ConfigError("unknown attention variant '" + name + "'");
}

std::size_t relative_index(std::size_t i, std::size_t j, std::size_t max_distance) {
  const auto r = static_cast<std::ptrdiff_t>(max_distance);
  const std::ptrdiff_t d = std::clamp(static_cast<std::ptrdiff_t>(j) - static_cast<std::ptrdiff_t>(i), -r, r);
  return static_cast<std::size_t>(d + r);
}

template <typename Real>
Tensor<Real> sinusoidal_positions(std::size_t length, std::size_t width) {
  Tensor<Real> pe({length, width});
  for (std::size_t pos = 0; pos < length; ++pos) {
    for (std::size_t k = 0; k < width; ++k) {
      const double rate = std::pow(10000.0, -static_cast<double>(2 * (k / 2)) / static_cast<double>(width));
      const double angle = static_cast<double>(pos) * rate;
      pe.at(pos, k) = static_cast<Real>(k % 2 == 0 ? std::sin(angle) : std::cos(angle));
    }
  }
  return pe;
}

template <typename Real>
Var<Real> gather_relative(Var<Real> logits, std::size_t max_distance) {
  const Tensor<Real>& lv = logits.value();
  const std::size_t buckets = 2 * max_distance + 1;
  if (lv.rank() != 2 || lv.dim(1) != buckets) {
    throw DimensionError("gather_relative: expected [T, " + std::to_string(buckets) + "], got " +
                         shape_string(lv.shape()));
  }
  const std::size_t n = lv.dim(0);
  Tensor<Real> out({n, n});
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) out.at(i, j) = lv.at(i, relative_index(i, j, max_distance));
  }
  const std::size_t il = logits.id();
  return logits.tape()->record(std::move(out), {logits}, [il, n, max_distance](Tape<Real>& t, const Tensor<Real>&,
                                                                               const Tensor<Real>& g) {
    Tensor<Real>& d = t.grad(il);
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < n; ++j) d.at(i, relative_index(i, j, max_distance)) += g.at(i, j);
    }
  });
}

// ---------------------------------------------------------------------------

template <typename Real>
AbstractQueryAttention<Real>::AbstractQueryAttention(ParameterStore<Real>& store, const std::string& name,
                                                     const AttentionConfig& config)
    : config_(config) {
  if (config.num_heads == 0 || config.head_size == 0 || config.d_model == 0) {
    throw ConfigError("attention dimensions must be positive");
  }
  if (config.variant == AttentionVariant::kNone) return;
  const std::size_t width = config.num_heads * config.head_size;
  const std::size_t d = config.d_model;
  if (config.variant == AttentionVariant::kAbstractRel) {
    Rng rng = store.init_rng(name + ".abstract_query");
    abstract_query_ = &store.add(name + ".abstract_query", init::glorot_uniform<Real>(rng, {1, d}, 1, d));
  }
  query_.emplace(store, name + ".query", d, width, config.num_blocks, Activation::kNone, false);
  key_.emplace(store, name + ".key", d, width, config.num_blocks, Activation::kNone, false);
  value_.emplace(store, name + ".value", d, width, config.num_blocks, Activation::kNone, false);
  if (config.uses_relative_keys()) {
    const std::size_t buckets = 2 * config.max_relative_distance + 1;
    Rng rng = store.init_rng(name + ".relative_keys");
    relative_keys_ = &store.add(name + ".relative_keys",
                                init::glorot_uniform<Real>(rng, {buckets, width}, buckets, config.head_size));
  }
  output_.emplace(store, name + ".output", width, d, config.num_blocks, Activation::kNone, false);
}

template <typename Real>
Var<Real> AbstractQueryAttention<Real>::queries(Tape<Real>& tape, Var<Real> inputs, std::size_t length) const {
  if (abstract_query_) return repeat_rows(query_->forward(tape, tape.parameter(*abstract_query_)), length);
  return query_->forward(tape, inputs);
}

template <typename Real>
AttentionResult<Real> AbstractQueryAttention<Real>::attend(Tape<Real>& tape, Var<Real> embeddings, bool training,
                                                           std::uint64_t seed, std::string_view seed_path) const {
  const Tensor<Real>& ev = embeddings.value();
  if (ev.rank() != 2 || ev.dim(1) != config_.d_model) {
    throw DimensionError("attend: expected [T, " + std::to_string(config_.d_model) + "], got " +
                         shape_string(ev.shape()));
  }
  const std::size_t length = ev.dim(0);
  const std::size_t hs = config_.head_size;
  AttentionResult<Real> result;
  result.probs = Tensor<Real>({config_.num_heads, length, length});
  if (config_.variant == AttentionVariant::kNone) {
    result.output = tape.constant(Tensor<Real>({length, config_.d_model}));
    return result;
  }

  Var<Real> inputs = embeddings;
  if (config_.variant == AttentionVariant::kSelfAbs) {
    inputs = add(embeddings, tape.constant(sinusoidal_positions<Real>(length, config_.d_model)));
  }
  Var<Real> q_all = queries(tape, inputs, length);
  Var<Real> k_all = key_->forward(tape, inputs);
  Var<Real> v_all = value_->forward(tape, inputs);
  Var<Real> rel_all;
  if (relative_keys_) rel_all = tape.parameter(*relative_keys_);

  const Real inv_sqrt = static_cast<Real>(1.0 / std::sqrt(static_cast<double>(hs)));
  const std::string base(seed_path);
  std::vector<Var<Real>> heads;
  for (std::size_t h = 0; h < config_.num_heads; ++h) {
    Var<Real> q = slice_cols(q_all, h * hs, hs);
    Var<Real> scores = matmul_transposed(q, slice_cols(k_all, h * hs, hs));
    if (rel_all.valid()) {
      Var<Real> rel_logits = matmul_transposed(q, slice_cols(rel_all, h * hs, hs));
      scores = add(scores, gather_relative(rel_logits, config_.max_relative_distance));
    }
    scores = scale(scores, inv_sqrt);
    if (config_.masks_current()) scores = mask_diagonal(scores);
    Var<Real> probs = softmax_lastdim(scores, /*all_masked_ok=*/true);
    std::copy_n(probs.value().raw(), length * length, result.probs.raw() + h * length * length);
    probs = dropout(probs, config_.attention_dropout, training, seed, base + "/head" + std::to_string(h));
    heads.push_back(matmul(probs, slice_cols(v_all, h * hs, hs)));
  }
  result.output = output_->forward(tape, concat_cols(heads));
  return result;
}

// ---------------------------------------------------------------------------

template <typename Real>
FusionGate<Real>::FusionGate(ParameterStore<Real>& store, const std::string& name, std::size_t d_model,
                             std::size_t num_blocks)
    : gate_(store, name, 2 * d_model, d_model, num_blocks, Activation::kSigmoid) {}

template <typename Real>
Var<Real> FusionGate<Real>::gate_values(Tape<Real>& tape, Var<Real> attended, Var<Real> embeddings) const {
  if (attended.shape() != embeddings.shape()) {
    throw DimensionError("gate_fuse: attention output " + shape_string(attended.shape()) +
                         " and embeddings " + shape_string(embeddings.shape()) + " differ");
  }
  return gate_.forward(tape, concat_cols<Real>({attended, embeddings}));
}

template <typename Real>
Var<Real> FusionGate<Real>::fuse(Tape<Real>& tape, Var<Real> attended, Var<Real> embeddings) const {
  Var<Real> g = gate_values(tape, attended, embeddings);
  return add(attended, mul(g, sub(embeddings, attended)));
}

template Tensor<float> sinusoidal_positions<float>(std::size_t, std::size_t);
template Tensor<double> sinusoidal_positions<double>(std::size_t, std::size_t);
template Var<float> gather_relative(Var<float>, std::size_t);
template Var<double> gather_relative(Var<double>, std::size_t);
template class AbstractQueryAttention<float>;
template class AbstractQueryAttention<double>;
template class FusionGate<float>;
template class FusionGate<double>;

}  // namespace slotlab
