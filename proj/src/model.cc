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

#include "slotlab/model.h"

#include <cstdio>
#include <fstream>
#include <functional>
#include <map>
#include <tuple>

#include "slotlab/rng.h"

namespace slotlab {

AttentionConfig ModelConfig::attention() const {
  AttentionConfig cfg;
  cfg.num_heads = num_heads;
  cfg.head_size = head_size;
  cfg.d_model = d_model;
  cfg.max_relative_distance = max_relative_distance;
  cfg.attention_dropout = attention_dropout;
  cfg.variant = variant;
  cfg.mask_current = mask_current;
  cfg.num_blocks = blocks();
  return cfg;
}

CharEncoderDims ModelConfig::encoder(std::size_t vocab_size) const {
  CharEncoderDims dims;
  dims.vocab_size = vocab_size;
  dims.char_embed_dim = char_embed_dim;
  dims.lstm_units = lstm_units;
  dims.d_model = d_model;
  dims.num_blocks = blocks();
  return dims;
}

void ModelConfig::validate() const {
  const std::pair<const char*, std::size_t> positive[] = {
      {"char_embed_dim", char_embed_dim}, {"lstm_units", lstm_units}, {"d_model", d_model},
      {"num_heads", num_heads},           {"head_size", head_size},   {"num_blocks", num_blocks},
      {"max_relative_distance", max_relative_distance}, {"batch_size", batch_size}};
  for (const auto& [name, value] : positive) {
    if (value == 0) throw ConfigError(std::string(name) + " must be positive");
  }
  for (const auto& [name, rate] : {std::pair{"dropout", dropout}, std::pair{"attention_dropout", attention_dropout}}) {
    if (!(rate >= 0.0 && rate < 1.0)) throw ConfigError(std::string(name) + " must lie in [0, 1)");
  }
  if (weight_decay < 0.0) throw ConfigError("weight_decay must be non-negative");
  if (!(optimizer.lr >= 0.0) || !(optimizer.eps > 0.0) || !(optimizer.beta1 >= 0.0 && optimizer.beta1 < 1.0) ||
      !(optimizer.beta2 >= 0.0 && optimizer.beta2 < 1.0)) {
    throw ConfigError("optimizer needs lr >= 0, eps > 0 and betas in [0, 1)");
  }
  const std::size_t k = blocks();
  if (k > 1) {
    const std::size_t width = num_heads * head_size;
    const std::tuple<const char*, std::size_t, std::size_t> layers[] = {
        {"encoder.lstm.input", char_embed_dim, 4 * lstm_units},
        {"encoder.projection", lstm_units, d_model},
        {"attention projections", d_model, width},
        {"gate", 2 * d_model, d_model}};
    for (const auto& [name, in, out] : layers) {
      if (in % k != 0 || out % k != 0) {
        throw ConfigError(std::string(name) + " (" + std::to_string(in) + " -> " + std::to_string(out) +
                          ") is not divisible into " + std::to_string(k) + " blocks");
      }
    }
  }
}

nlohmann::ordered_json config_to_json(const ModelConfig& c) {
  nlohmann::ordered_json j;
  j["char_embed_dim"] = c.char_embed_dim;
  j["lstm_units"] = c.lstm_units;
  j["d_model"] = c.d_model;
  j["num_heads"] = c.num_heads;
  j["head_size"] = c.head_size;
  j["num_blocks"] = c.num_blocks;
  j["use_block_dense"] = c.use_block_dense;
  j["dropout"] = c.dropout;
  j["attention_dropout"] = c.attention_dropout;
  j["weight_decay"] = c.weight_decay;
  j["variant"] = variant_name(c.variant);
  j["mask_current"] = c.mask_current ? nlohmann::ordered_json(*c.mask_current) : nlohmann::ordered_json(nullptr);
  j["max_relative_distance"] = c.max_relative_distance;
  j["optimizer"] = {{"lr", c.optimizer.lr},
                    {"betas", {c.optimizer.beta1, c.optimizer.beta2}},
                    {"eps", c.optimizer.eps}};
  j["batch_size"] = c.batch_size;
  j["max_epochs"] = c.max_epochs;
  j["patience"] = c.patience;
  j["seed"] = c.seed;
  j["dtype"] = dtype_name(c.dtype);
  j["num_threads"] = c.num_threads;
  j["deterministic"] = c.deterministic;
  return j;
}

namespace {

std::size_t as_size(const nlohmann::json& v, const std::string& key) {
  if (!v.is_number_unsigned()) throw ConfigError("config key '" + key + "' must be a non-negative integer");
  return v.get<std::size_t>();
}

double as_double(const nlohmann::json& v, const std::string& key) {
  if (!v.is_number()) throw ConfigError("config key '" + key + "' must be a number");
  return v.get<double>();
}

bool as_bool(const nlohmann::json& v, const std::string& key) {
  if (!v.is_boolean()) throw ConfigError("config key '" + key + "' must be true or false");
  return v.get<bool>();
}

std::string as_string(const nlohmann::json& v, const std::string& key) {
  if (!v.is_string()) throw ConfigError("config key '" + key + "' must be a string");
  return v.get<std::string>();
}

void read_optimizer(const nlohmann::json& v, OptimizerConfig& opt) {
  if (!v.is_object()) throw ConfigError("config key 'optimizer' must be an object");
  for (const auto& [key, value] : v.items()) {
    if (key == "lr") {
      opt.lr = as_double(value, "optimizer.lr");
    } else if (key == "eps") {
      opt.eps = as_double(value, "optimizer.eps");
    } else if (key == "betas") {
      if (!value.is_array() || value.size() != 2) throw ConfigError("optimizer.betas must be a two-element array");
      opt.beta1 = as_double(value[0], "optimizer.betas");
      opt.beta2 = as_double(value[1], "optimizer.betas");
    } else {
      throw ConfigError("unknown config key 'optimizer." + key + "'");
    }
  }
}

}  // namespace

ModelConfig config_from_json(const nlohmann::json& json) {
  if (!json.is_object()) throw ConfigError("config must be a JSON object");
  ModelConfig c;
  using Setter = std::function<void(const nlohmann::json&)>;
  const std::map<std::string, Setter> setters = {
      {"char_embed_dim", [&](const auto& v) { c.char_embed_dim = as_size(v, "char_embed_dim"); }},
      {"lstm_units", [&](const auto& v) { c.lstm_units = as_size(v, "lstm_units"); }},
      {"d_model", [&](const auto& v) { c.d_model = as_size(v, "d_model"); }},
      {"num_heads", [&](const auto& v) { c.num_heads = as_size(v, "num_heads"); }},
      {"head_size", [&](const auto& v) { c.head_size = as_size(v, "head_size"); }},
      {"num_blocks", [&](const auto& v) { c.num_blocks = as_size(v, "num_blocks"); }},
      {"use_block_dense", [&](const auto& v) { c.use_block_dense = as_bool(v, "use_block_dense"); }},
      {"dropout", [&](const auto& v) { c.dropout = as_double(v, "dropout"); }},
      {"attention_dropout", [&](const auto& v) { c.attention_dropout = as_double(v, "attention_dropout"); }},
      {"weight_decay", [&](const auto& v) { c.weight_decay = as_double(v, "weight_decay"); }},
      {"variant", [&](const auto& v) { c.variant = parse_variant(as_string(v, "variant")); }},
      {"mask_current",
       [&](const auto& v) {
         if (v.is_null()) {
           c.mask_current.reset();
         } else {
           c.mask_current = as_bool(v, "mask_current");
         }
       }},
      {"max_relative_distance",
       [&](const auto& v) { c.max_relative_distance = as_size(v, "max_relative_distance"); }},
      {"optimizer", [&](const auto& v) { read_optimizer(v, c.optimizer); }},
      {"batch_size", [&](const auto& v) { c.batch_size = as_size(v, "batch_size"); }},
      {"max_epochs", [&](const auto& v) { c.max_epochs = as_size(v, "max_epochs"); }},
      {"patience", [&](const auto& v) { c.patience = as_size(v, "patience"); }},
      {"seed", [&](const auto& v) { c.seed = as_size(v, "seed"); }},
      {"dtype", [&](const auto& v) { c.dtype = parse_dtype(as_string(v, "dtype")); }},
      {"num_threads", [&](const auto& v) { c.num_threads = as_size(v, "num_threads"); }},
      {"deterministic", [&](const auto& v) { c.deterministic = as_bool(v, "deterministic"); }},
  };
  for (const auto& [key, value] : json.items()) {
    auto it = setters.find(key);
    if (it == setters.end()) throw ConfigError("unknown config key '" + key + "'");
    it->second(value);
  }
  c.validate();
  return c;
}

ModelConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config " + path.string());
  try {
    return config_from_json(nlohmann::json::parse(in));
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(path.string() + ": malformed JSON: " + e.what());
  }
}

std::string config_hash(const ModelConfig& config) {
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx",
                static_cast<unsigned long long>(fnv1a64(config_to_json(config).dump())));
  return buf;
}

nlohmann::ordered_json ParameterBreakdown::to_json() const {
  nlohmann::ordered_json layers = nlohmann::ordered_json::object();
  for (const auto& [name, count] : entries) layers[name] = count;
  return {{"parameters", layers}, {"total", total}};
}

ParameterBreakdown count_parameters(const ModelConfig& config, std::size_t vocab_size, std::size_t tagset_size) {
  config.validate();
  if (vocab_size < 2) throw ConfigError("character vocabulary needs at least PAD and UNK");
  if (tagset_size == 0) throw ConfigError("tag set must not be empty");
  const std::size_t ce = config.char_embed_dim, u = config.lstm_units, d = config.d_model;
  const std::size_t width = config.num_heads * config.head_size, k = config.blocks();
  const std::size_t tags = tagset_size;
  ParameterBreakdown b;
  auto add = [&](const std::string& name, std::size_t count) {
    b.entries.emplace_back(name, count);
    b.total += count;
  };
  add("encoder.char_embed", vocab_size * ce);
  add("encoder.lstm.input.kernel", ce * 4 * u / k);
  add("encoder.lstm.recurrent_kernel", u * 4 * u);
  add("encoder.lstm.bias", 4 * u);
  add("encoder.projection.kernel", u * d / k);
  add("encoder.projection.bias", d);
  const AttentionConfig att = config.attention();
  if (att.variant != AttentionVariant::kNone) {
    if (att.variant == AttentionVariant::kAbstractRel) add("attention.abstract_query", d);
    add("attention.query.kernel", d * width / k);
    add("attention.key.kernel", d * width / k);
    add("attention.value.kernel", d * width / k);
    if (att.uses_relative_keys()) add("attention.relative_keys", (2 * att.max_relative_distance + 1) * width);
    add("attention.output.kernel", width * d / k);
  }
  add("gate.kernel", 2 * d * d / k);
  add("gate.bias", d);
  add("crf.emission.kernel", d * tags);
  add("crf.emission.bias", tags);
  add("crf.transitions", tags * tags);
  add("crf.start", tags);
  add("crf.end", tags);
  return b;
}

// ---------------------------------------------------------------------------

template <typename Real>
SlotTagger<Real>::SlotTagger(const ModelConfig& config, CharVocab vocab, TagSet tagset)
    : config_((config.validate(), config)),
      vocab_(std::move(vocab)),
      tagset_(std::move(tagset)),
      store_(derive_seed(config.seed, "parameters")),
      encoder_(store_, "encoder", config.encoder(vocab_.size())),
      attention_(store_, "attention", config.attention()),
      gate_(store_, "gate", config.d_model, config.blocks()),
      crf_(store_, "crf", config.d_model, tagset_.size()) {}

template <typename Real>
std::vector<CharIds> SlotTagger<Real>::encode_words(const std::vector<std::string>& words) const {
  std::vector<CharIds> out;
  out.reserve(words.size());
  for (const std::string& w : words) out.push_back(vocab_.encode(w));
  return out;
}

template <typename Real>
ForwardResult<Real> SlotTagger<Real>::forward(Tape<Real>& tape, const std::vector<CharIds>& words, bool training,
                                              std::uint64_t dropout_seed) const {
  if (words.empty()) throw ContractError("cannot tag an utterance with no tokens");
  ForwardResult<Real> out;
  Var<Real> embeddings = encoder_.encode_utterance(tape, words, config_.dropout, training, dropout_seed, "embed");
  AttentionResult<Real> att = attention_.attend(tape, embeddings, training, dropout_seed, "attention");
  out.attention_probs = std::move(att.probs);
  out.hidden = gate_.fuse(tape, att.output, embeddings);
  out.emissions = crf_.emissions(tape, out.hidden);
  return out;
}

template <typename Real>
Var<Real> SlotTagger<Real>::loss(Tape<Real>& tape, const std::vector<CharIds>& words,
                                 const std::vector<std::size_t>& gold, bool training,
                                 std::uint64_t dropout_seed) const {
  ForwardResult<Real> f = forward(tape, words, training, dropout_seed);
  return crf_nll(f.emissions, tape.parameter(crf_.transitions()), tape.parameter(crf_.start()),
                 tape.parameter(crf_.end()), gold);
}

template <typename Real>
Tensor<Real> SlotTagger<Real>::emissions(const std::vector<std::string>& words) const {
  Tape<Real> tape;
  return forward(tape, encode_words(words), false, 0).emissions.value();
}

template <typename Real>
std::vector<std::size_t> SlotTagger<Real>::predict_tags(const std::vector<std::string>& words) const {
  return crf_.decode(emissions(words)).tags;
}

template <typename Real>
std::vector<SlotSpan> SlotTagger<Real>::predict(const Utterance& utt) const {
  return spans_from_bio(predict_tags(utt.words()), tagset_);
}

template class SlotTagger<float>;
template class SlotTagger<double>;

}  // namespace slotlab
