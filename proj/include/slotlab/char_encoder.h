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

#ifndef SLOTLAB_CHAR_ENCODER_H_
#define SLOTLAB_CHAR_ENCODER_H_

#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "slotlab/autodiff.h"
#include "slotlab/layers.h"

namespace slotlab {

using CharIds = std::vector<std::size_t>;

// Code-point vocabulary. Ids 0 and 1 are reserved for padding and unknown
// characters; observed characters follow in first-seen order. Immutable once
// built.
class CharVocab {
 public:
  static constexpr std::size_t kPad = 0;
  static constexpr std::size_t kUnk = 1;

  CharVocab() = default;
  static CharVocab build(const std::vector<std::string>& words);
  // Inverse of chars(): rebuilds the vocabulary from its id-ordered characters.
  static CharVocab from_chars(std::u32string chars);

  std::size_t size() const { return chars_.size() + 2; }
  std::size_t id(char32_t c) const;
  // Throws ContractError on an empty word.
  CharIds encode(std::string_view word) const;
  // Characters for ids 2, 3, ...
  const std::u32string& chars() const { return chars_; }

  bool operator==(const CharVocab& other) const { return chars_ == other.chars_; }

 private:
  std::u32string chars_;
  std::unordered_map<char32_t, std::size_t> ids_;
};

// Standard LSTM cell, gate order (input, forget, candidate, output).
template <typename Real>
class LstmCell {
 public:
  struct State {
    Var<Real> h;
    Var<Real> c;
  };

  // input_blocks > 1 stores the input kernel block diagonally.
  LstmCell(ParameterStore<Real>& store, const std::string& name, std::size_t input_dim, std::size_t units,
           std::size_t input_blocks);

  State zero_state(Tape<Real>& tape, std::size_t batch) const;
  State step(Tape<Real>& tape, Var<Real> x, const State& state) const;
  // x times the input kernel; step_projected takes this instead of x.
  Var<Real> project_inputs(Tape<Real>& tape, Var<Real> x) const;
  State step_projected(Tape<Real>& tape, Var<Real> projected, const State& state) const;
  // Rows with active[r] == false keep their previous state.
  State step_masked(Tape<Real>& tape, Var<Real> x, const State& state, const std::vector<bool>& active) const;
  State keep_inactive(const State& next, const State& state, const std::vector<bool>& active) const;

  std::size_t units() const { return units_; }
  std::size_t input_dim() const { return input_dim_; }

 private:
  std::size_t input_dim_;
  std::size_t units_;
  AffineLayer<Real> input_kernel_;
  Parameter<Real>* recurrent_kernel_;
  Parameter<Real>* bias_;
};

struct CharEncoderDims {
  std::size_t vocab_size = 0;
  std::size_t char_embed_dim = 256;
  std::size_t lstm_units = 128;
  std::size_t d_model = 256;
  // > 1 blocks the LSTM input kernel and the output projection.
  std::size_t num_blocks = 1;
};

// Word embeddings from characters: embedding -> LSTM over the characters of
// each word, left to right from a zero state -> dense projection of the final
// hidden state.
template <typename Real>
class CharLstmEncoder {
 public:
  CharLstmEncoder(ParameterStore<Real>& store, const std::string& name, const CharEncoderDims& dims);

  // [1, d_model].
  Var<Real> encode_word(Tape<Real>& tape, const CharIds& chars) const;
  // [T, d_model]; words are padded into one batch and masked, so row t equals
  // encode_word(words[t]).
  Var<Real> encode_words(Tape<Real>& tape, const std::vector<CharIds>& words) const;
  // encode_words followed by dropout on the word embeddings.
  Var<Real> encode_utterance(Tape<Real>& tape, const std::vector<CharIds>& words, double dropout_rate,
                             bool training, std::uint64_t seed, std::string_view seed_path) const;

  const CharEncoderDims& dims() const { return dims_; }
  const LstmCell<Real>& cell() const { return cell_; }

 private:
  CharEncoderDims dims_;
  Parameter<Real>* char_embed_;
  LstmCell<Real> cell_;
  AffineLayer<Real> projection_;
};

}  // namespace slotlab

#endif  // SLOTLAB_CHAR_ENCODER_H_
