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
#include <map>

#include "slotlab/errors.h"
#include "slotlab/grad_check.h"
#include "slotlab/model.h"
#include "slotlab/synthetic.h"
#include "slotlab/trainer.h"

namespace slotlab {
namespace {

ModelConfig toy_config() {
  ModelConfig c;
  c.char_embed_dim = 4;
  c.lstm_units = 4;
  c.d_model = 8;
  c.num_heads = 2;
  c.head_size = 4;
  c.num_blocks = 2;
  c.max_relative_distance = 2;
  c.use_block_dense = false;
  return c;
}

const std::vector<AttentionVariant> kVariants = {AttentionVariant::kNone, AttentionVariant::kSelfAbs,
                                                 AttentionVariant::kSelfRel, AttentionVariant::kAbstractRel};

TEST(CountParametersTest, ToyConfigHandCount) {
  // V=10, K=5.
  // encoder: 10*4 + 4*16 + 4*16 + 16 + 4*8 + 8 = 224
  // attention: query 8 + 3 * 8*8 + relative 5*8 + output 8*8 = 304
  // gate: 16*8 + 8 = 136; crf: 8*5 + 5 + 25 + 5 + 5 = 80
  EXPECT_EQ(count_parameters(toy_config(), 10, 5).total, 744u);
  ModelConfig blocked = toy_config();
  blocked.use_block_dense = true;
  // Halved: lstm input 32, projection 16, q/k/v 96, output 32, gate 64.
  EXPECT_EQ(count_parameters(blocked, 10, 5).total, 744u - 240u);
}

TEST(CountParametersTest, AtisScale) {
  ModelConfig full;
  full.use_block_dense = false;
  ModelConfig blocked;
  const std::size_t f = count_parameters(full, 47, 79).total;
  const std::size_t b = count_parameters(blocked, 47, 79).total;
  EXPECT_EQ(f, 933454u);
  EXPECT_EQ(b, 216654u);
  EXPECT_GE(f, 900000u);
  EXPECT_LE(f, 1150000u);
  const double factor = static_cast<double>(f) / static_cast<double>(b);
  EXPECT_GE(factor, 3.8);
  EXPECT_LE(factor, 4.7);
}

TEST(CountParametersTest, ReductionFactorAcrossVocabSizes) {
  ModelConfig full;
  full.use_block_dense = false;
  for (std::size_t v : {40u, 60u, 90u}) {
    for (std::size_t k : {11u, 79u, 150u}) {
      const double factor = static_cast<double>(count_parameters(full, v, k).total) /
                            static_cast<double>(count_parameters(ModelConfig{}, v, k).total);
      EXPECT_GE(factor, 3.5) << v << " " << k;
    }
  }
}

TEST(CountParametersTest, MatchesConstructedStoreForEveryVariant) {
  auto corpus = make_restaurant_corpus({});
  for (AttentionVariant variant : kVariants) {
    for (bool blocked : {false, true}) {
      ModelConfig c;
      c.variant = variant;
      c.use_block_dense = blocked;
      auto model = build_model<float>(c, corpus.train);
      auto counted = count_parameters(c, model->vocab().size(), model->tagset().size());
      EXPECT_EQ(counted.total, model->parameters().total_count()) << variant_name(variant) << " " << blocked;
      ASSERT_EQ(counted.entries.size(), model->parameters().size());
      for (const auto& [name, n] : counted.entries) {
        ASSERT_TRUE(model->parameters().contains(name)) << name;
        EXPECT_EQ(model->parameters().get(name).value.size(), n) << name;
      }
    }
  }
}

TEST(ModelConfigTest, DivisibilityErrorsNameTheLayer) {
  ModelConfig c;
  c.d_model = 250;
  try {
    c.validate();
    FAIL() << "expected ConfigError";
  } catch (const ConfigError& e) {
    EXPECT_NE(std::string(e.what()).find("projection"), std::string::npos) << e.what();
  }
  ModelConfig heads;
  heads.num_blocks = 3;
  EXPECT_THROW(heads.validate(), ConfigError);
  heads.use_block_dense = false;
  EXPECT_NO_THROW(heads.validate());
  EXPECT_THROW(count_parameters(c, 47, 79), ConfigError);
}

TEST(ModelConfigTest, JsonRoundTripAndUnknownKeys) {
  ModelConfig c;
  c.variant = AttentionVariant::kSelfRel;
  c.mask_current = true;
  c.optimizer.lr = 0.002;
  c.dtype = DType::kF64;
  c.seed = 99;
  const auto j = config_to_json(c);
  const ModelConfig back = config_from_json(nlohmann::json::parse(j.dump()));
  EXPECT_EQ(config_to_json(back), j);
  EXPECT_EQ(config_hash(back), config_hash(c));
  c.seed = 100;
  EXPECT_NE(config_hash(back), config_hash(c));
  EXPECT_EQ(config_hash(c).size(), 16u);

  EXPECT_THROW(config_from_json(nlohmann::json{{"dropuot", 0.1}}), ConfigError);
  EXPECT_THROW(config_from_json(nlohmann::json{{"variant", "bogus"}}), ConfigError);
  EXPECT_THROW(config_from_json(nlohmann::json{{"num_heads", "four"}}), ConfigError);
  EXPECT_EQ(config_from_json(nlohmann::json::object()).d_model, 256u);
}

Utterance three_token_utterance() {
  return make_utterance_from_labels({"fly", "to", "rome"}, {"O", "B-a", "B-b"});
}

TEST(SlotTaggerTest, FullModelGradientDefaultConfig) {
  ModelConfig c;
  c.dtype = DType::kF64;
  c.dropout = 0.0;
  c.attention_dropout = 0.0;
  Utterance u = three_token_utterance();
  auto model = build_model<double>(c, {u});
  ASSERT_EQ(model->tagset().size(), 5u);
  const auto words = model->encode_words(u.words());
  const auto gold = bio_from_spans(u, model->tagset());
  GradCheckOptions opt;
  opt.max_coords_per_parameter = 12;
  opt.seed = 5;
  opt.denominator_floor = 1e-6;
  opt.epsilon = 1e-4;
  auto r = grad_check([&](Tape<double>& tape) { return model->loss(tape, words, gold, false, 0); },
                      model->parameters(), opt);
  EXPECT_LT(r.max_relative_error, 1e-4)
      << r.worst_parameter << "[" << r.worst_index << "] " << r.analytic << " vs " << r.numeric;
  EXPECT_GT(r.coordinates_checked, 200u);
}

TEST(SlotTaggerTest, FullModelGradientToyConfigEveryVariant) {
  Utterance u = three_token_utterance();
  for (AttentionVariant variant : kVariants) {
    for (bool blocked : {false, true}) {
      ModelConfig c = toy_config();
      c.variant = variant;
      c.use_block_dense = blocked;
      auto model = build_model<double>(c, {u});
      const auto words = model->encode_words(u.words());
      const auto gold = bio_from_spans(u, model->tagset());
      GradCheckOptions opt;
      opt.denominator_floor = 1e-6;
      auto r = grad_check([&](Tape<double>& tape) { return model->loss(tape, words, gold, false, 0); },
                          model->parameters(), opt);
      EXPECT_LT(r.max_relative_error, 1e-4)
          << variant_name(variant) << " blocked=" << blocked << " " << r.worst_parameter << "[" << r.worst_index
          << "] " << r.analytic << " vs " << r.numeric;
      EXPECT_EQ(r.coordinates_checked, model->parameters().total_count());
    }
  }
}

TEST(SlotTaggerTest, FloatAndDoubleAgree) {
  auto corpus = make_city_corpus({});
  ModelConfig c;
  auto f = build_model<float>(c, corpus.train);
  auto d = build_model<double>(c, corpus.train);
  for (std::size_t i = 0; i < 10; ++i) {
    const auto words = corpus.test[i].words();
    Tensor<float> ef = f->emissions(words);
    Tensor<double> ed = d->emissions(words);
    ASSERT_EQ(ef.shape(), ed.shape());
    for (std::size_t k = 0; k < ef.size(); ++k) EXPECT_NEAR(ef.raw()[k], ed.raw()[k], 1e-3);
  }
}

TEST(SlotTaggerTest, ForwardShapesAndDeterministicInference) {
  auto corpus = make_restaurant_corpus({});
  auto model = build_model<float>(ModelConfig{}, corpus.train);
  const Utterance& u = corpus.test[0];
  Tape<float> tape;
  auto fwd = model->forward(tape, model->encode_words(u.words()), false, 0);
  EXPECT_EQ(fwd.hidden.shape(), (Shape{u.tokens.size(), 256}));
  EXPECT_EQ(fwd.emissions.shape(), (Shape{u.tokens.size(), model->tagset().size()}));
  EXPECT_EQ(model->predict(u), model->predict(u));
  Tape<float> t1, t2;
  auto a = model->forward(t1, model->encode_words(u.words()), true, 1).emissions.value();
  auto b = model->forward(t2, model->encode_words(u.words()), true, 2).emissions.value();
  EXPECT_NE(a, b);
}

TEST(SlotTaggerTest, SaturatedOutsideTagPredictsNoSpans) {
  auto corpus = make_restaurant_corpus({});
  auto model = build_model<float>(ModelConfig{}, corpus.train);
  model->parameters().get("crf.emission.bias").value.raw()[model->tagset().index("O")] = 1000.0f;
  for (std::size_t i = 0; i < 20; ++i) EXPECT_TRUE(model->predict(corpus.test[i]).empty());
}

TEST(SlotTaggerTest, UnknownCharactersDoNotFail) {
  auto corpus = make_city_corpus({});
  auto model = build_model<float>(ModelConfig{}, corpus.train);
  Utterance u = make_utterance("vol vers Zürich ✈ 東京", {});
  auto spans = model->predict(u);
  for (const SlotSpan& s : spans) EXPECT_LT(s.end, u.tokens.size());
}

TEST(SlotTaggerTest, PredictionsAreValidSpansForEveryVariant) {
  auto corpus = make_restaurant_corpus({});
  for (AttentionVariant variant : kVariants) {
    ModelConfig c;
    c.variant = variant;
    auto model = build_model<float>(c, corpus.train);
    for (std::size_t i = 0; i < 10; ++i) {
      Utterance u = corpus.test[i];
      u.spans = model->predict(u);
      EXPECT_NO_THROW(validate_utterance(u)) << variant_name(variant);
    }
  }
}

}  // namespace
}  // namespace slotlab
