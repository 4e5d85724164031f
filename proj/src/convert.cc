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


#include "slotlab/convert.h"

#include <fstream>
#include <sstream>
#include <stdexcept>

#include "slotlab/errors.h"
#include "slotlab/utf8.h"

namespace slotlab {
namespace {

std::string where(const std::string& source, std::size_t record) {
  return source + ":" + std::to_string(record);
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string cur;
  std::istringstream in(s);
  while (std::getline(in, cur, sep)) out.push_back(cur);
  if (!s.empty() && s.back() == sep) out.emplace_back();
  return out;
}

std::vector<std::string> words_of(const std::string& s) {
  std::vector<std::string> out;
  std::istringstream in(s);
  std::string w;
  while (in >> w) out.push_back(w);
  return out;
}

std::string strip_cr(std::string line) {
  if (!line.empty() && line.back() == '\r') line.pop_back();
  return line;
}

}  // namespace

std::vector<Utterance> read_restaurants8k(std::istream& in, const std::string& source) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw DataError(source + ": malformed JSON: " + e.what());
  }
  if (!doc.is_array()) throw DataError(source + ": expected a JSON array");
  std::vector<Utterance> out;
  for (std::size_t i = 0; i < doc.size(); ++i) {
    const auto& rec = doc[i];
    try {
      const std::string text = rec.at("userInput").at("text").get<std::string>();
      std::vector<CharSpan> spans;
      for (const auto& label : rec.value("labels", nlohmann::json::array())) {
        const auto& vs = label.at("valueSpan");
        CharSpan s;
        s.start_char = vs.value("startIndex", std::size_t{0});
        s.end_char = vs.at("endIndex").get<std::size_t>();
        s.slot = label.at("slot").get<std::string>();
        spans.push_back(std::move(s));
      }
      out.push_back(make_utterance(text, spans));
    } catch (const nlohmann::json::exception& e) {
      throw DataError(where(source, i + 1) + ": " + e.what());
    } catch (const DataError& e) {
      throw DataError(where(source, i + 1) + ": " + e.what());
    }
  }
  return out;
}

std::vector<Utterance> read_atis(std::istream& in, const std::string& source) {
  std::vector<Utterance> out;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    line = strip_cr(line);
    if (words_of(line).empty()) continue;
    const auto tab = line.find('\t');
    if (tab == std::string::npos) throw DataError(where(source, lineno) + ": missing tab between words and tags");
    auto words = words_of(line.substr(0, tab));
    auto tags = words_of(line.substr(tab + 1));
    if (!words.empty() && words.front() == "BOS") words.erase(words.begin());
    if (!words.empty() && words.back() == "EOS") words.pop_back();
    if (!tags.empty() && tags.front() == "O" && tags.size() == words.size() + 2) tags.erase(tags.begin());
    if (tags.size() == words.size() + 1) tags.pop_back();
    if (tags.size() != words.size()) {
      throw DataError(where(source, lineno) + ": " + std::to_string(words.size()) + " words but " +
                      std::to_string(tags.size()) + " tags");
    }
    try {
      out.push_back(make_utterance_from_labels(words, tags));
    } catch (const DataError& e) {
      throw DataError(where(source, lineno) + ": " + e.what());
    }
  }
  return out;
}

std::vector<Utterance> read_mtop(std::istream& in, const std::string& source) {
  std::vector<Utterance> out;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    line = strip_cr(line);
    if (line.empty()) continue;
    const auto cols = split(line, '\t');
    if (cols.size() < 4) throw DataError(where(source, lineno) + ": expected at least 4 tab-separated columns");
    try {
      std::vector<CharSpan> spans;
      for (const std::string& item : split(cols[2], ',')) {
        if (item.empty()) continue;
        const auto a = item.find(':');
        const auto b = item.find(':', a == std::string::npos ? a : a + 1);
        if (a == std::string::npos || b == std::string::npos) throw DataError("bad slot entry '" + item + "'");
        spans.push_back({std::stoul(item.substr(0, a)), std::stoul(item.substr(a + 1, b - a - 1)), item.substr(b + 1)});
      }
      const std::string lang = cols.size() > 5 ? cols[5] : "";
      if (cols.size() < 8 || cols[7].empty()) {
        out.push_back(make_utterance(cols[3], spans, lang));
        continue;
      }
      const auto tokens = nlohmann::json::parse(cols[7]);
      const auto& words = tokens.at("tokens");
      const auto& offs = tokens.at("tokenSpans");
      if (words.size() != offs.size()) throw DataError("tokens and tokenSpans differ in length");
      std::vector<std::string> w;
      std::vector<std::string> labels(words.size(), "O");
      for (std::size_t t = 0; t < words.size(); ++t) w.push_back(words[t].get<std::string>());
      for (const CharSpan& s : spans) {
        bool first = true;
        for (std::size_t t = 0; t < words.size(); ++t) {
          const std::size_t start = offs[t].at("start").get<std::size_t>();
          const std::size_t end = start + offs[t].at("length").get<std::size_t>();
          if (start >= s.start_char && end <= s.end_char) {
            labels[t] = (first ? "B-" : "I-") + s.slot;
            first = false;
          }
        }
        if (first) throw DataError("slot " + s.slot + " covers no token");
      }
      out.push_back(make_utterance_from_labels(w, labels, lang));
    } catch (const nlohmann::json::exception& e) {
      throw DataError(where(source, lineno) + ": " + e.what());
    } catch (const std::logic_error&) {
      throw DataError(where(source, lineno) + ": non-numeric slot offset");
    } catch (const DataError& e) {
      throw DataError(where(source, lineno) + ": " + e.what());
    }
  }
  return out;
}

NativeFormat parse_native_format(const std::string& name) {
  if (name == "restaurants8k") return NativeFormat::kRestaurants8k;
  if (name == "atis") return NativeFormat::kAtis;
  if (name == "mtop") return NativeFormat::kMtop;
  throw ConfigError("unknown native format '" + name + "' (expected restaurants8k, atis or mtop)");
}

std::vector<Utterance> load_native(const std::filesystem::path& path, NativeFormat format) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open " + path.string());
  switch (format) {
    case NativeFormat::kRestaurants8k:
      return read_restaurants8k(in, path.string());
    case NativeFormat::kAtis:
      return read_atis(in, path.string());
    case NativeFormat::kMtop:
      return read_mtop(in, path.string());
  }
  return {};
}

}  // namespace slotlab
