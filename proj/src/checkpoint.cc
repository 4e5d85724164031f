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

#include "slotlab/checkpoint.h"

#include <bit>
#include <cstdint>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <iterator>

#include "slotlab/utf8.h"

namespace slotlab {

namespace {

template <typename Real>
using Bits = std::conditional_t<sizeof(Real) == 4, std::uint32_t, std::uint64_t>;

template <typename Real>
void append_le(std::string& out, Real value) {
  const Bits<Real> bits = std::bit_cast<Bits<Real>>(value);
  for (std::size_t b = 0; b < sizeof(Real); ++b) out.push_back(static_cast<char>((bits >> (8 * b)) & 0xFF));
}

template <typename Real>
Real read_le(const unsigned char* p) {
  Bits<Real> bits = 0;
  for (std::size_t b = 0; b < sizeof(Real); ++b) bits |= static_cast<Bits<Real>>(p[b]) << (8 * b);
  return std::bit_cast<Real>(bits);
}

std::string hex64(std::uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

}  // namespace

template <typename Real>
void save_checkpoint(const std::filesystem::path& dir, const SlotTagger<Real>& model) {
  std::filesystem::create_directories(dir);
  std::string blob;
  blob.reserve(model.parameters().total_count() * sizeof(Real));
  nlohmann::ordered_json index = nlohmann::ordered_json::array();
  for (const auto& p : model.parameters().items()) {
    index.push_back({{"name", p->name},
                     {"shape", p->value.shape()},
                     {"offset", blob.size()},
                     {"dtype", dtype_name(dtype_of<Real>())}});
    for (Real v : p->value.data()) append_le(blob, v);
  }
  nlohmann::ordered_json chars = nlohmann::ordered_json::array();
  for (char32_t c : model.vocab().chars()) chars.push_back(encode_utf8(c));

  nlohmann::ordered_json manifest;
  manifest["format_version"] = kCheckpointFormatVersion;
  manifest["dtype"] = dtype_name(dtype_of<Real>());
  manifest["endianness"] = "little";
  manifest["config"] = config_to_json(model.config());
  manifest["config_hash"] = config_hash(model.config());
  manifest["tagset"] = model.tagset().tags();
  manifest["char_vocab"] = chars;
  manifest["parameters"] = index;
  manifest["blob"] = {{"file", kBlobFile}, {"bytes", blob.size()}, {"fnv1a64", hex64(fnv1a64(blob))}};

  std::ofstream bin(dir / kBlobFile, std::ios::binary | std::ios::trunc);
  bin.write(blob.data(), static_cast<std::streamsize>(blob.size()));
  std::ofstream man(dir / kManifestFile, std::ios::trunc);
  man << manifest.dump(2) << '\n';
  if (!bin || !man) throw DataError("failed writing checkpoint to " + dir.string());
}

nlohmann::json read_manifest(const std::filesystem::path& dir) {
  std::ifstream in(dir / kManifestFile);
  if (!in) throw DataError("no checkpoint manifest in " + dir.string());
  nlohmann::json manifest;
  try {
    manifest = nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw DataError("malformed checkpoint manifest: " + std::string(e.what()));
  }
  if (!manifest.is_object() || manifest.value("format_version", -1) != kCheckpointFormatVersion) {
    throw DataError("unsupported checkpoint format in " + dir.string());
  }
  if (manifest.value("endianness", "") != "little") throw DataError("checkpoint endianness must be little");
  return manifest;
}

DType checkpoint_dtype(const std::filesystem::path& dir) {
  return parse_dtype(read_manifest(dir).at("dtype").get<std::string>());
}

template <typename Real>
std::unique_ptr<SlotTagger<Real>> load_checkpoint(const std::filesystem::path& dir) {
  const nlohmann::json manifest = read_manifest(dir);
  std::ifstream bin(dir / kBlobFile, std::ios::binary);
  if (!bin) throw DataError("no parameter blob in " + dir.string());
  const std::string blob((std::istreambuf_iterator<char>(bin)), std::istreambuf_iterator<char>());
  try {
    const auto& blob_info = manifest.at("blob");
    if (blob.size() != blob_info.at("bytes").get<std::size_t>() ||
        hex64(fnv1a64(blob)) != blob_info.at("fnv1a64").get<std::string>()) {
      throw DataError("parameter blob does not match its manifest (size or checksum)");
    }
    const DType stored = parse_dtype(manifest.at("dtype").get<std::string>());
    ModelConfig config = config_from_json(manifest.at("config"));
    std::u32string chars;
    for (const auto& c : manifest.at("char_vocab")) {
      const std::u32string cp = decode_utf8(c.get<std::string>());
      if (cp.size() != 1) throw DataError("char_vocab entries must be single characters");
      chars += cp;
    }
    auto model = std::make_unique<SlotTagger<Real>>(
        config, CharVocab::from_chars(chars), TagSet::from_tags(manifest.at("tagset").get<std::vector<std::string>>()));
    const auto& index = manifest.at("parameters");
    const auto& params = model->parameters().items();
    if (index.size() != params.size()) throw DataError("checkpoint parameter count does not match its config");
    const std::size_t width = stored == DType::kF64 ? 8 : 4;
    for (std::size_t i = 0; i < params.size(); ++i) {
      Parameter<Real>& p = *params[i];
      const auto& entry = index[i];
      if (entry.at("name").get<std::string>() != p.name || entry.at("shape").get<Shape>() != p.value.shape()) {
        throw DataError("checkpoint parameter " + entry.at("name").get<std::string>() + " does not match " + p.name +
                        " " + shape_string(p.value.shape()));
      }
      const std::size_t offset = entry.at("offset").get<std::size_t>();
      if (offset + p.value.size() * width > blob.size()) throw DataError("parameter " + p.name + " runs past the blob");
      const auto* base = reinterpret_cast<const unsigned char*>(blob.data()) + offset;
      for (std::size_t j = 0; j < p.value.size(); ++j) {
        p.value[j] = stored == DType::kF64 ? static_cast<Real>(read_le<double>(base + 8 * j))
                                           : static_cast<Real>(read_le<float>(base + 4 * j));
      }
    }
    return model;
  } catch (const nlohmann::json::exception& e) {
    throw DataError("malformed checkpoint manifest: " + std::string(e.what()));
  }
}

template void save_checkpoint(const std::filesystem::path&, const SlotTagger<float>&);
template void save_checkpoint(const std::filesystem::path&, const SlotTagger<double>&);
template std::unique_ptr<SlotTagger<float>> load_checkpoint<float>(const std::filesystem::path&);
template std::unique_ptr<SlotTagger<double>> load_checkpoint<double>(const std::filesystem::path&);

}  // namespace slotlab
