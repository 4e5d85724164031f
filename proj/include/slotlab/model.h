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

#ifndef SLOTLAB_MODEL_H_
#define SLOTLAB_MODEL_H_

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"
#include "slotlab/attention.h"
#include "slotlab/char_encoder.h"
#include "slotlab/crf.h"
#include "slotlab/data.h"

namespace slotlab {

struct OptimizerConfig {
  double lr = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
};

struct ModelConfig {
  std::size_t char_embed_dim = 256;
  std::size_t lstm_units = 128;
  std::size_t d_model = 256;
  std::size_t num_heads = 4;
  std::size_t head_size = 128;
  std::size_t num_blocks = 8;
  bool use_block_dense = true;
  double dropout = 0.1;
  double attention_dropout = 0.1;
  double weight_decay = 0.01;
  AttentionVariant variant = AttentionVariant::kAbstractRel;
  std::optional<bool> mask_current;
  std::size_t max_relative_distance = 8;
  OptimizerConfig optimizer;
  std::size_t batch_size = 32;
  std::size_t max_epochs = 100;
  std::size_t patience = 10;
  std::uint64_t seed = 0;
  DType dtype = DType::kF32;
  // 0 uses every hardware thread.
  std::size_t num_threads = 1;
  // Forces serial batch processing. Results do not depend on the thread
  // count either way; this only removes the threads.
  bool deterministic = false;

  std::size_t blocks() const { return use_block_dense ? num_blocks : 1; }
  AttentionConfig attention() const;
  CharEncoderDims encoder(std::size_t vocab_size) const;
  // Throws ConfigError.
  void validate() const;
};

nlohmann::ordered_json config_to_json(const ModelConfig& config);
// Missing keys keep their defaults; unknown keys are a ConfigError.
ModelConfig config_from_json(const nlohmann::json& json);
ModelConfig load_config(const std::filesystem::path& path);
// 16 hex digits over the canonical JSON form.
std::string config_hash(const ModelConfig& config);

struct ParameterBreakdown {
  std::vector<std::pair<std::string, std::size_t>> entries;
  std::size_t total = 0;

  nlohmann::ordered_json to_json() const;
};

// Arithmetic count of every stored trainable, keyed by parameter name.
ParameterBreakdown count_parameters(const ModelConfig& config, std::size_t vocab_size, std::size_t tagset_size);

template <typename Real>
struct ForwardResult {
  Var<Real> hidden;      // [T, d_model], input to the CRF head
  Var<Real> emissions;   // [T, K]
  Tensor<Real> attention_probs;
};

template <typename Real>
class SlotTagger {
 public:
  SlotTagger(const ModelConfig& config, CharVocab vocab, TagSet tagset);
  SlotTagger(const SlotTagger&) = delete;
  SlotTagger& operator=(const SlotTagger&) = delete;

  const ModelConfig& config() const { return config_; }
  const CharVocab& vocab() const { return vocab_; }
  const TagSet& tagset() const { return tagset_; }
  ParameterStore<Real>& parameters() { return store_; }
  const ParameterStore<Real>& parameters() const { return store_; }

  std::vector<CharIds> encode_words(const std::vector<std::string>& words) const;

  ForwardResult<Real> forward(Tape<Real>& tape, const std::vector<CharIds>& words, bool training,
                              std::uint64_t dropout_seed) const;
  Var<Real> loss(Tape<Real>& tape, const std::vector<CharIds>& words, const std::vector<std::size_t>& gold,
                 bool training, std::uint64_t dropout_seed) const;

  // Inference: dropout off.
  Tensor<Real> emissions(const std::vector<std::string>& words) const;
  std::vector<std::size_t> predict_tags(const std::vector<std::string>& words) const;
  std::vector<SlotSpan> predict(const Utterance& utt) const;

 private:
  ModelConfig config_;
  CharVocab vocab_;
  TagSet tagset_;
  ParameterStore<Real> store_;
  CharLstmEncoder<Real> encoder_;
  AbstractQueryAttention<Real> attention_;
  FusionGate<Real> gate_;
  CrfHead<Real> crf_;
};

// Invokes fn(float{}) or fn(double{}) according to dtype.
template <typename Fn>
decltype(auto) dispatch_dtype(DType dtype, Fn&& fn) {
  if (dtype == DType::kF64) return fn(double{});
  return fn(float{});
}

}  // namespace slotlab

#endif  // SLOTLAB_MODEL_H_
