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

#include "slotlab/char_encoder.h"

#include <algorithm>

#include "slotlab/utf8.h"

namespace slotlab {

CharVocab CharVocab::build(const std::vector<std::string>& words) {
  std::u32string chars;
  std::unordered_map<char32_t, std::size_t> seen;
  for (const std::string& w : words) {
    for (char32_t c : decode_utf8(w)) {
      if (seen.emplace(c, chars.size()).second) chars.push_back(c);
    }
  }
  return from_chars(std::move(chars));
}

CharVocab CharVocab::from_chars(std::u32string chars) {
  CharVocab v;
  v.chars_ = std::move(chars);
  for (std::size_t i = 0; i < v.chars_.size(); ++i) {
    if (!v.ids_.emplace(v.chars_[i], i + 2).second) {
      throw DataError("character vocabulary lists '" + encode_utf8(v.chars_[i]) + "' twice");
    }
  }
  return v;
}

std::size_t CharVocab::id(char32_t c) const {
  auto it = ids_.find(c);
  return it == ids_.end() ? kUnk : it->second;
}

CharIds CharVocab::encode(std::string_view word) const {
  const std::u32string cps = decode_utf8(word);
  if (cps.empty()) throw ContractError("cannot encode an empty word");
  CharIds ids;
  ids.reserve(cps.size());
  for (char32_t c : cps) ids.push_back(id(c));
  return ids;
}

// ---------------------------------------------------------------------------

template <typename Real>
LstmCell<Real>::LstmCell(ParameterStore<Real>& store, const std::string& name, std::size_t input_dim,
                         std::size_t units, std::size_t input_blocks)
    : input_dim_(input_dim),
      units_(units),
      input_kernel_(store, name + ".input", input_dim, 4 * units, input_blocks, Activation::kNone,
                    /*use_bias=*/false) {
  Rng rng = store.init_rng(name + ".recurrent_kernel");
  recurrent_kernel_ = &store.add(name + ".recurrent_kernel", init::orthogonal<Real>(rng, units, 4 * units));
  Tensor<Real> bias({4 * units});
  for (std::size_t j = units; j < 2 * units; ++j) bias[j] = Real{1};  // forget gate
  bias_ = &store.add(name + ".bias", std::move(bias), /*decay=*/false);
}

template <typename Real>
typename LstmCell<Real>::State LstmCell<Real>::zero_state(Tape<Real>& tape, std::size_t batch) const {
  return {tape.constant(Tensor<Real>({batch, units_})), tape.constant(Tensor<Real>({batch, units_}))};
}

namespace {

// Gate nonlinearities and state update on pre-activations z = [i f g o].
// Output is [h | c].
template <typename Real>
Var<Real> lstm_pointwise(Var<Real> z, Var<Real> c_prev) {
  const Tensor<Real>& zv = z.value();
  const Tensor<Real>& cv = c_prev.value();
  const std::size_t batch = cv.rows(), u = cv.cols();
  if (zv.rows() != batch || zv.cols() != 4 * u) {
    throw DimensionError("lstm gates " + shape_string(zv.shape()) + " do not match state " + shape_string(cv.shape()));
  }
  auto sig = [](Real x) { return Real{1} / (Real{1} + std::exp(-x)); };
  Tensor<Real> out({batch, 2 * u});
  for (std::size_t b = 0; b < batch; ++b) {
    const Real* zr = zv.raw() + b * 4 * u;
    Real* o = out.raw() + b * 2 * u;
    for (std::size_t j = 0; j < u; ++j) {
      const Real c = sig(zr[u + j]) * cv.at(b, j) + sig(zr[j]) * std::tanh(zr[2 * u + j]);
      o[j] = sig(zr[3 * u + j]) * std::tanh(c);
      o[u + j] = c;
    }
  }
  const std::size_t zid = z.id(), cid = c_prev.id();
  return z.tape()->record(std::move(out), {z, c_prev}, [=](Tape<Real>& tape, const Tensor<Real>& value,
                                                          const Tensor<Real>& grad) {
    const Tensor<Real>& zt = tape.value(zid);
    const Tensor<Real>& ct = tape.value(cid);
    const bool need_z = tape.requires_grad(zid), need_c = tape.requires_grad(cid);
    Real* dz = need_z ? tape.grad(zid).raw() : nullptr;
    Real* dcp = need_c ? tape.grad(cid).raw() : nullptr;
    for (std::size_t b = 0; b < batch; ++b) {
      const Real* zr = zt.raw() + b * 4 * u;
      const Real* v = value.raw() + b * 2 * u;
      const Real* g = grad.raw() + b * 2 * u;
      for (std::size_t j = 0; j < u; ++j) {
        const Real i = sig(zr[j]), f = sig(zr[u + j]), cand = std::tanh(zr[2 * u + j]), o = sig(zr[3 * u + j]);
        const Real tc = std::tanh(v[u + j]);
        const Real dh = g[j];
        const Real dc = g[u + j] + dh * o * (Real{1} - tc * tc);
        if (dz) {
          Real* dzr = dz + b * 4 * u;
          dzr[j] += dc * cand * i * (Real{1} - i);
          dzr[u + j] += dc * ct.at(b, j) * f * (Real{1} - f);
          dzr[2 * u + j] += dc * i * (Real{1} - cand * cand);
          dzr[3 * u + j] += dh * tc * o * (Real{1} - o);
        }
        if (dcp) dcp[b * u + j] += dc * f;
      }
    }
  });
}

}  // namespace

template <typename Real>
Var<Real> LstmCell<Real>::project_inputs(Tape<Real>& tape, Var<Real> x) const {
  return input_kernel_.forward(tape, x);
}

template <typename Real>
typename LstmCell<Real>::State LstmCell<Real>::step(Tape<Real>& tape, Var<Real> x, const State& state) const {
  return step_projected(tape, project_inputs(tape, x), state);
}

template <typename Real>
typename LstmCell<Real>::State LstmCell<Real>::step_projected(Tape<Real>& tape, Var<Real> projected,
                                                             const State& state) const {
  Var<Real> z = add(projected, matmul(state.h, tape.parameter(*recurrent_kernel_)));
  z = add_row_vector(z, tape.parameter(*bias_));
  Var<Real> hc = lstm_pointwise(z, state.c);
  return {slice_cols(hc, 0, units_), slice_cols(hc, units_, units_)};
}

template <typename Real>
typename LstmCell<Real>::State LstmCell<Real>::step_masked(Tape<Real>& tape, Var<Real> x, const State& state,
                                                           const std::vector<bool>& active) const {
  return keep_inactive(step(tape, x, state), state, active);
}

template <typename Real>
typename LstmCell<Real>::State LstmCell<Real>::keep_inactive(const State& next, const State& state,
                                                             const std::vector<bool>& active) const {
  if (std::all_of(active.begin(), active.end(), [](bool a) { return a; })) return next;
  return {select_rows(active, next.h, state.h), select_rows(active, next.c, state.c)};
}

// ---------------------------------------------------------------------------

template <typename Real>
CharLstmEncoder<Real>::CharLstmEncoder(ParameterStore<Real>& store, const std::string& name,
                                       const CharEncoderDims& dims)
    : dims_(dims),
      char_embed_([&] {
        if (dims.vocab_size < 2) throw ConfigError("character vocabulary must include PAD and UNK");
        Rng rng = store.init_rng(name + ".char_embed");
        return &store.add(name + ".char_embed",
                          init::uniform<Real>(rng, {dims.vocab_size, dims.char_embed_dim}, 0.05));
      }()),
      cell_(store, name + ".lstm", dims.char_embed_dim, dims.lstm_units, dims.num_blocks),
      projection_(store, name + ".projection", dims.lstm_units, dims.d_model, dims.num_blocks, Activation::kNone) {}

template <typename Real>
Var<Real> CharLstmEncoder<Real>::encode_word(Tape<Real>& tape, const CharIds& chars) const {
  return encode_words(tape, {chars});
}

template <typename Real>
Var<Real> CharLstmEncoder<Real>::encode_words(Tape<Real>& tape, const std::vector<CharIds>& words) const {
  if (words.empty()) throw ContractError("encode_words: no words");
  std::size_t max_len = 0;
  for (const CharIds& w : words) {
    if (w.empty()) throw ContractError("encode_words: empty word");
    max_len = std::max(max_len, w.size());
  }
  // Row lookup commutes with the input projection, so the projection is
  // applied once to the whole table instead of once per step.
  Var<Real> table = cell_.project_inputs(tape, tape.parameter(*char_embed_));
  auto state = cell_.zero_state(tape, words.size());
  std::vector<std::size_t> ids(words.size());
  std::vector<bool> active(words.size());
  for (std::size_t t = 0; t < max_len; ++t) {
    for (std::size_t w = 0; w < words.size(); ++w) {
      active[w] = t < words[w].size();
      ids[w] = active[w] ? words[w][t] : CharVocab::kPad;
    }
    state = cell_.keep_inactive(cell_.step_projected(tape, embedding_lookup(table, ids), state), state, active);
  }
  return projection_.forward(tape, state.h);
}

template <typename Real>
Var<Real> CharLstmEncoder<Real>::encode_utterance(Tape<Real>& tape, const std::vector<CharIds>& words,
                                                  double dropout_rate, bool training, std::uint64_t seed,
                                                  std::string_view seed_path) const {
  return dropout(encode_words(tape, words), dropout_rate, training, seed, seed_path);
}

template class LstmCell<float>;
template class LstmCell<double>;
template class CharLstmEncoder<float>;
template class CharLstmEncoder<double>;

}  // namespace slotlab
