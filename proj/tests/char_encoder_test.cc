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

#include <gtest/gtest.h>

#include <cmath>

#include "slotlab/char_encoder.h"
#include "slotlab/grad_check.h"
#include "slotlab/utf8.h"
#include "test_util.h"

namespace slotlab {
namespace {

using testing::max_abs_diff;
using testing::random_tensor;

CharEncoderDims small_dims(std::size_t vocab, std::size_t blocks = 1) {
  CharEncoderDims dims;
  dims.vocab_size = vocab;
  dims.char_embed_dim = 6;
  dims.lstm_units = 4;
  dims.d_model = 6;
  dims.num_blocks = blocks;
  return dims;
}

TEST(Utf8, RoundTripAndErrors) {
  const std::string text = "Zürich → 東京";
  const std::u32string cps = decode_utf8(text);
  EXPECT_EQ(cps.size(), 11u);
  EXPECT_EQ(encode_utf8(cps), text);
  EXPECT_THROW(decode_utf8("\xC3"), DataError);
  EXPECT_THROW(decode_utf8("\xFF"), DataError);
}

TEST(CharVocab, ReservedIdsAndUnknowns) {
  auto vocab = CharVocab::build({"ab", "ba", "c"});
  EXPECT_EQ(vocab.size(), 5u);
  EXPECT_EQ(vocab.encode("abc"), (CharIds{2, 3, 4}));
  EXPECT_EQ(vocab.encode("aé"), (CharIds{2, CharVocab::kUnk}));
  EXPECT_THROW(vocab.encode(""), ContractError);
  EXPECT_EQ(CharVocab::from_chars(vocab.chars()), vocab);
}

TEST(CharEncoder, DeterministicAndFinite) {
  auto vocab = CharVocab::build({"boston", "denver"});
  ParameterStore<double> store(3);
  CharLstmEncoder<double> enc(store, "enc", small_dims(vocab.size()));
  Tape<double> tape;
  auto a = enc.encode_word(tape, vocab.encode("boston")).value();
  auto b = enc.encode_word(tape, vocab.encode("boston")).value();
  EXPECT_EQ(a, b);
  EXPECT_EQ(a.shape(), (Shape{1, 6}));
  auto oov = enc.encode_word(tape, vocab.encode("Zagreb!")).value();
  EXPECT_TRUE(all_finite(oov));
}

double sigm(double x) { return 1.0 / (1.0 + std::exp(-x)); }

TEST(CharEncoder, SingleCharMatchesOneStepOracle) {
  auto vocab = CharVocab::build({"xyz"});
  ParameterStore<double> store(11);
  CharLstmEncoder<double> enc(store, "enc", small_dims(vocab.size()));
  Rng rng(1);
  store.get("enc.lstm.bias").value = random_tensor(rng, {16});
  store.get("enc.projection.bias").value = random_tensor(rng, {6});

  const std::size_t id = vocab.encode("y")[0];
  const auto& table = store.get("enc.char_embed").value;
  const auto& wi = store.get("enc.lstm.input.kernel").value;
  const auto& bias = store.get("enc.lstm.bias").value;
  const auto& wp = store.get("enc.projection.kernel").value;
  const auto& bp = store.get("enc.projection.bias").value;
  // Zero state: the recurrent kernel contributes nothing.
  std::vector<double> z(16);
  for (std::size_t j = 0; j < 16; ++j) {
    z[j] = bias[j];
    for (std::size_t i = 0; i < 6; ++i) z[j] += table.at(id, i) * wi.at(i, j);
  }
  std::vector<double> h(4);
  for (std::size_t u = 0; u < 4; ++u) {
    const double in = sigm(z[u]), g = std::tanh(z[8 + u]), out = sigm(z[12 + u]);
    h[u] = out * std::tanh(in * g);
  }
  Tensor<double> expected({1, 6});
  for (std::size_t j = 0; j < 6; ++j) {
    expected[j] = bp[j];
    for (std::size_t u = 0; u < 4; ++u) expected[j] += h[u] * wp.at(u, j);
  }
  Tape<double> tape;
  EXPECT_LT(max_abs_diff(enc.encode_word(tape, {id}).value(), expected), 1e-12);
}

TEST(CharEncoder, BatchedEqualsPerWord) {
  auto vocab = CharVocab::build({"from", "new", "york", "to", "la"});
  for (std::size_t blocks : {1u, 2u}) {
    ParameterStore<double> store(5);
    CharLstmEncoder<double> enc(store, "enc", small_dims(vocab.size(), blocks));
    std::vector<CharIds> words = {vocab.encode("from"), vocab.encode("new"), vocab.encode("a"),
                                  vocab.encode("york!"), vocab.encode("to")};
    Tape<double> tape;
    auto batch = enc.encode_words(tape, words).value();
    ASSERT_EQ(batch.shape(), (Shape{5, 6}));
    for (std::size_t t = 0; t < words.size(); ++t) {
      auto single = enc.encode_word(tape, words[t]).value();
      for (std::size_t c = 0; c < 6; ++c) EXPECT_NEAR(batch.at(t, c), single[c], 1e-12);
    }
    auto one = enc.encode_words(tape, {words[3]}).value();
    EXPECT_LT(max_abs_diff(one, enc.encode_word(tape, words[3]).value()), 1e-12);
  }
}

TEST(CharEncoder, PermutingWordsPermutesRows) {
  auto vocab = CharVocab::build({"abc", "de", "f"});
  ParameterStore<double> store(2);
  CharLstmEncoder<double> enc(store, "enc", small_dims(vocab.size()));
  Tape<double> tape;
  auto fwd = enc.encode_utterance(tape, {vocab.encode("abc"), vocab.encode("de"), vocab.encode("f")}, 0.1,
                                  false, 0, "x").value();
  auto rev = enc.encode_utterance(tape, {vocab.encode("f"), vocab.encode("de"), vocab.encode("abc")}, 0.1,
                                  false, 0, "x").value();
  for (std::size_t t = 0; t < 3; ++t) {
    for (std::size_t c = 0; c < 6; ++c) EXPECT_EQ(fwd.at(t, c), rev.at(2 - t, c));
  }
  auto single = enc.encode_utterance(tape, {vocab.encode("de")}, 0.1, false, 0, "x").value();
  EXPECT_EQ(single.shape(), (Shape{1, 6}));
}

TEST(CharEncoder, DropoutOnlyWhenTraining) {
  auto vocab = CharVocab::build({"abc"});
  ParameterStore<double> store(2);
  CharLstmEncoder<double> enc(store, "enc", small_dims(vocab.size()));
  Tape<double> tape;
  std::vector<CharIds> words(20, vocab.encode("abc"));
  auto eval = enc.encode_utterance(tape, words, 0.5, false, 4, "x").value();
  auto train = enc.encode_utterance(tape, words, 0.5, true, 4, "x").value();
  EXPECT_NE(eval, train);
  EXPECT_EQ(train, enc.encode_utterance(tape, words, 0.5, true, 4, "x").value());
}

class LstmGradTest : public ::testing::TestWithParam<std::uint64_t> {};

TEST_P(LstmGradTest, CellOverEightSteps) {
  const std::uint64_t seed = GetParam();
  Rng rng(seed);
  ParameterStore<double> store(seed);
  LstmCell<double> cell(store, "cell", 3, 4, 1);
  store.get("cell.bias").value = random_tensor(rng, {16});
  std::vector<Parameter<double>*> xs;
  for (int t = 0; t < 8; ++t) xs.push_back(&store.add("x" + std::to_string(t), random_tensor(rng, {2, 3})));
  const auto w = random_tensor(rng, {2, 4});
  LossFn loss = [&](Tape<double>& tape) {
    auto state = cell.zero_state(tape, 2);
    for (std::size_t t = 0; t < 8; ++t) {
      state = cell.step_masked(tape, tape.parameter(*xs[t]), state, {true, t < 5});
    }
    return add(sum(mul_constant(state.h, w)), sum(mul_constant(state.c, w)));
  };
  auto result = grad_check(loss, store);
  EXPECT_LT(result.max_relative_error, 1e-5) << result.worst_parameter;
}

INSTANTIATE_TEST_SUITE_P(Seeds, LstmGradTest, ::testing::Range<std::uint64_t>(0, 10));

TEST(CharEncoderGrad, FullEncoder) {
  auto vocab = CharVocab::build({"from", "to"});
  ParameterStore<double> store(8);
  CharLstmEncoder<double> enc(store, "enc", small_dims(vocab.size(), 2));
  Rng rng(3);
  const auto w = random_tensor(rng, {3, 6});
  LossFn loss = [&](Tape<double>& tape) {
    auto out = enc.encode_words(tape, {vocab.encode("from"), vocab.encode("to"), vocab.encode("fr")});
    return sum(mul_constant(out, w));
  };
  auto result = grad_check(loss, store);
  EXPECT_LT(result.max_relative_error, 1e-5) << result.worst_parameter;
}

}  // namespace
}  // namespace slotlab
