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

#include "slotlab/data.h"

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>

#include "slotlab/rng.h"
#include "slotlab/utf8.h"

namespace slotlab {

namespace {

bool is_space(char32_t c) {
  return (c >= 0x09 && c <= 0x0D) || c == 0x20 || c == 0x85 || c == 0xA0 || c == 0x1680 ||
         (c >= 0x2000 && c <= 0x200A) || c == 0x2028 || c == 0x2029 || c == 0x202F || c == 0x205F || c == 0x3000;
}

std::string ascii_lower(std::string s) {
  for (char& c : s) {
    if (c >= 'A' && c <= 'Z') c = static_cast<char>(c - 'A' + 'a');
  }
  return s;
}

std::string trim(const std::string& s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string::npos) return "";
  const auto last = s.find_last_not_of(" \t\r\n");
  return s.substr(first, last - first + 1);
}

std::ifstream open_input(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open " + path.string());
  return in;
}

std::ofstream open_output(const std::filesystem::path& path) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write " + path.string());
  return out;
}

void check_label(const std::string& label) {
  if (label == "O") return;
  if (label.size() < 3 || label[1] != '-' || (label[0] != 'B' && label[0] != 'I')) {
    throw DataError("unknown tag prefix in '" + label + "'");
  }
}

}  // namespace

std::vector<std::string> Utterance::words() const {
  std::vector<std::string> out;
  out.reserve(tokens.size());
  for (const Token& t : tokens) out.push_back(t.text);
  return out;
}

bool is_token_punctuation(char32_t c) {
  if (c < 0x80) {
    return (c >= 0x21 && c <= 0x2F) || (c >= 0x3A && c <= 0x40) || (c >= 0x5B && c <= 0x60) ||
           (c >= 0x7B && c <= 0x7E);
  }
  return c == 0xA1 || c == 0xAB || c == 0xBB || c == 0xBF || (c >= 0x2010 && c <= 0x2027) ||
         (c >= 0x2030 && c <= 0x205E) || c == 0x3001 || c == 0x3002 || c == 0xFF01 || c == 0xFF0C ||
         c == 0xFF1F;
}

std::vector<Token> tokenize(std::string_view text) {
  const std::u32string cps = decode_utf8(text);
  std::vector<Token> tokens;
  auto emit = [&](std::size_t a, std::size_t b) {
    tokens.push_back({encode_utf8(std::u32string_view(cps).substr(a, b - a)), a, b});
  };
  std::size_t i = 0;
  while (i < cps.size()) {
    if (is_space(cps[i])) {
      ++i;
      continue;
    }
    std::size_t a = i, b = i;
    while (b < cps.size() && !is_space(cps[b])) ++b;
    i = b;
    while (a < b && is_token_punctuation(cps[a])) {
      emit(a, a + 1);
      ++a;
    }
    std::size_t e = b;
    while (e > a && is_token_punctuation(cps[e - 1])) --e;
    if (e > a) emit(a, e);
    for (std::size_t p = e; p < b; ++p) emit(p, p + 1);
  }
  return tokens;
}

void validate_utterance(const Utterance& utt) {
  const std::size_t length = decode_utf8(utt.text).size();
  if (utt.tokens.empty()) throw DataError("utterance has no tokens");
  std::size_t prev_end = 0;
  for (const Token& t : utt.tokens) {
    if (t.text.empty()) throw DataError("empty token");
    if (t.char_start < prev_end || t.char_end <= t.char_start || t.char_end > length) {
      throw DataError("token '" + t.text + "' has invalid offsets");
    }
    prev_end = t.char_end;
  }
  std::size_t next_free = 0;
  for (const SlotSpan& s : utt.spans) {
    if (s.slot.empty()) throw DataError("span with empty slot type");
    if (s.start > s.end || s.end >= utt.tokens.size()) {
      throw DataError("span (" + std::to_string(s.start) + "," + std::to_string(s.end) + "," + s.slot +
                      ") outside " + std::to_string(utt.tokens.size()) + " tokens");
    }
    if (s.start < next_free) throw DataError("overlapping or unsorted spans at slot '" + s.slot + "'");
    next_free = s.end + 1;
  }
}

Utterance make_utterance(std::string text, const std::vector<CharSpan>& char_spans, std::string lang) {
  std::vector<Token> tokens = tokenize(text);
  return make_utterance(std::move(text), std::move(tokens), char_spans, std::move(lang));
}

Utterance make_utterance(std::string text, std::vector<Token> tokens, const std::vector<CharSpan>& char_spans,
                         std::string lang) {
  Utterance utt;
  utt.tokens = std::move(tokens);
  utt.text = std::move(text);
  utt.lang = std::move(lang);
  for (const CharSpan& cs : char_spans) {
    const std::string where = "span [" + std::to_string(cs.start_char) + ", " + std::to_string(cs.end_char) +
                              ") '" + cs.slot + "'";
    if (cs.end_char <= cs.start_char) throw DataError(where + " is empty");
    auto first = std::find_if(utt.tokens.begin(), utt.tokens.end(),
                              [&](const Token& t) { return t.char_start == cs.start_char; });
    auto last = std::find_if(utt.tokens.begin(), utt.tokens.end(),
                             [&](const Token& t) { return t.char_end == cs.end_char; });
    if (first == utt.tokens.end() || last == utt.tokens.end()) {
      throw DataError(where + " does not align with token boundaries");
    }
    utt.spans.push_back({static_cast<std::size_t>(first - utt.tokens.begin()),
                         static_cast<std::size_t>(last - utt.tokens.begin()), cs.slot});
  }
  std::sort(utt.spans.begin(), utt.spans.end());
  validate_utterance(utt);
  return utt;
}

Utterance make_utterance_from_labels(const std::vector<std::string>& tokens, const std::vector<std::string>& labels,
                                     std::string lang) {
  if (tokens.size() != labels.size()) throw DataError("token and label counts differ");
  Utterance utt;
  utt.lang = std::move(lang);
  std::size_t offset = 0;
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    const std::size_t length = decode_utf8(tokens[i]).size();
    if (length == 0) throw DataError("empty token");
    if (i > 0) {
      utt.text += ' ';
      ++offset;
    }
    utt.text += tokens[i];
    utt.tokens.push_back({tokens[i], offset, offset + length});
    offset += length;
  }
  for (const std::string& l : labels) check_label(l);
  utt.spans = spans_from_labels(labels);
  validate_utterance(utt);
  return utt;
}

std::vector<CharSpan> char_spans(const Utterance& utt) {
  std::vector<CharSpan> out;
  for (const SlotSpan& s : utt.spans) {
    out.push_back({utt.tokens.at(s.start).char_start, utt.tokens.at(s.end).char_end, s.slot});
  }
  return out;
}

// ---------------------------------------------------------------------------

std::vector<Utterance> read_jsonl(std::istream& in, const std::string& source) {
  std::vector<Utterance> out;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    try {
      const nlohmann::json obj = nlohmann::json::parse(line);
      if (!obj.is_object()) throw DataError("expected a JSON object");
      if (!obj.contains("text") || !obj["text"].is_string()) throw DataError("missing string field 'text'");
      std::vector<CharSpan> spans;
      if (obj.contains("spans")) {
        if (!obj["spans"].is_array()) throw DataError("'spans' must be an array");
        for (const auto& s : obj["spans"]) {
          if (!s.is_object() || !s.contains("start_char") || !s.contains("end_char") || !s.contains("slot") ||
              !s["start_char"].is_number_unsigned() || !s["end_char"].is_number_unsigned() ||
              !s["slot"].is_string()) {
            throw DataError("span needs non-negative start_char, end_char and a string slot");
          }
          spans.push_back({s["start_char"].get<std::size_t>(), s["end_char"].get<std::size_t>(),
                           s["slot"].get<std::string>()});
        }
      }
      std::string lang;
      if (obj.contains("lang")) {
        if (!obj["lang"].is_string()) throw DataError("'lang' must be a string");
        lang = obj["lang"].get<std::string>();
      }
      std::string text = obj["text"].get<std::string>();
      if (!obj.contains("tokens")) {
        out.push_back(make_utterance(std::move(text), spans, lang));
        continue;
      }
      if (!obj["tokens"].is_array()) throw DataError("'tokens' must be an array of [start_char, end_char]");
      const std::u32string cps = decode_utf8(text);
      std::vector<Token> tokens;
      for (const auto& t : obj["tokens"]) {
        if (!t.is_array() || t.size() != 2 || !t[0].is_number_unsigned() || !t[1].is_number_unsigned()) {
          throw DataError("'tokens' must be an array of [start_char, end_char]");
        }
        const auto a = t[0].get<std::size_t>(), b = t[1].get<std::size_t>();
        if (a >= b || b > cps.size()) throw DataError("token offsets out of range");
        tokens.push_back({encode_utf8(std::u32string_view(cps).substr(a, b - a)), a, b});
      }
      out.push_back(make_utterance(std::move(text), std::move(tokens), spans, lang));
    } catch (const nlohmann::json::exception& e) {
      throw DataError(source + ":" + std::to_string(line_no) + ": malformed JSON: " + e.what());
    } catch (const DataError& e) {
      throw DataError(source + ":" + std::to_string(line_no) + ": " + e.what());
    }
  }
  return out;
}

void write_jsonl(std::ostream& out, const std::vector<Utterance>& utts) {
  for (const Utterance& utt : utts) {
    nlohmann::ordered_json obj;
    obj["text"] = utt.text;
    obj["spans"] = nlohmann::ordered_json::array();
    for (const CharSpan& cs : char_spans(utt)) {
      obj["spans"].push_back({{"start_char", cs.start_char}, {"end_char", cs.end_char}, {"slot", cs.slot}});
    }
    if (!utt.lang.empty()) obj["lang"] = utt.lang;
    if (tokenize(utt.text) != utt.tokens) {
      obj["tokens"] = nlohmann::ordered_json::array();
      for (const Token& t : utt.tokens) obj["tokens"].push_back({t.char_start, t.char_end});
    }
    out << obj.dump() << '\n';
  }
}

std::vector<Utterance> load_jsonl(const std::filesystem::path& path) {
  auto in = open_input(path);
  return read_jsonl(in, path.string());
}

void save_jsonl(const std::filesystem::path& path, const std::vector<Utterance>& utts) {
  auto out = open_output(path);
  write_jsonl(out, utts);
}

std::vector<Utterance> read_conll(std::istream& in, const std::string& source) {
  std::vector<Utterance> out;
  std::vector<std::string> tokens, labels;
  std::size_t block = 1, line_no = 0;
  auto flush = [&]() {
    if (tokens.empty()) return;
    try {
      out.push_back(make_utterance_from_labels(tokens, labels));
    } catch (const DataError& e) {
      throw DataError(source + ": block " + std::to_string(block) + " (line " + std::to_string(line_no) +
                      "): " + e.what());
    }
    tokens.clear();
    labels.clear();
    ++block;
  };
  std::string line;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (trim(line).empty()) {
      flush();
      continue;
    }
    if (line.rfind("-DOCSTART-", 0) == 0) continue;
    const auto tab = line.find('\t');
    const std::string where = source + ": block " + std::to_string(block) + " (line " + std::to_string(line_no) + ")";
    if (tab == std::string::npos) throw DataError(where + ": expected token<TAB>tag");
    std::string token = line.substr(0, tab);
    std::string label = trim(line.substr(tab + 1));
    if (token.empty() || token.find(' ') != std::string::npos) throw DataError(where + ": empty token or token with space");
    try {
      check_label(label);
    } catch (const DataError& e) {
      throw DataError(where + ": " + e.what());
    }
    tokens.push_back(std::move(token));
    labels.push_back(std::move(label));
  }
  flush();
  return out;
}

void write_conll(std::ostream& out, const std::vector<Utterance>& utts) {
  for (const Utterance& utt : utts) {
    const auto labels = bio_labels(utt);
    for (std::size_t i = 0; i < utt.tokens.size(); ++i) out << utt.tokens[i].text << '\t' << labels[i] << '\n';
    out << '\n';
  }
}

std::vector<Utterance> load_conll(const std::filesystem::path& path) {
  auto in = open_input(path);
  return read_conll(in, path.string());
}

void save_conll(const std::filesystem::path& path, const std::vector<Utterance>& utts) {
  auto out = open_output(path);
  write_conll(out, utts);
}

namespace {
bool is_conll_path(const std::filesystem::path& path) {
  const std::string ext = ascii_lower(path.extension().string());
  return ext == ".conll" || ext == ".bio" || ext == ".txt" || ext == ".tsv";
}
}  // namespace

std::vector<Utterance> load_dataset(const std::filesystem::path& path) {
  return is_conll_path(path) ? load_conll(path) : load_jsonl(path);
}

void save_dataset(const std::filesystem::path& path, const std::vector<Utterance>& utts) {
  if (is_conll_path(path)) {
    save_conll(path, utts);
  } else {
    save_jsonl(path, utts);
  }
}

// ---------------------------------------------------------------------------

std::vector<std::string> bio_labels(const Utterance& utt) {
  std::vector<std::string> labels(utt.tokens.size(), "O");
  for (const SlotSpan& s : utt.spans) {
    if (s.end >= labels.size() || s.start > s.end) throw DataError("span outside utterance");
    for (std::size_t t = s.start; t <= s.end; ++t) {
      if (labels[t] != "O") throw DataError("overlapping spans at token " + std::to_string(t));
      labels[t] = (t == s.start ? "B-" : "I-") + s.slot;
    }
  }
  return labels;
}

std::vector<std::size_t> bio_from_spans(const Utterance& utt, const TagSet& tagset) {
  std::vector<std::size_t> tags;
  for (const std::string& l : bio_labels(utt)) tags.push_back(tagset.index(l));
  return tags;
}

TagSet build_tagset(const std::vector<Utterance>& utts) {
  std::vector<std::string> slots;
  for (const Utterance& u : utts) {
    for (const SlotSpan& s : u.spans) slots.push_back(s.slot);
  }
  return TagSet(slots);
}

std::vector<std::string> collect_words(const std::vector<Utterance>& utts) {
  std::vector<std::string> words;
  for (const Utterance& u : utts) {
    for (const Token& t : u.tokens) words.push_back(t.text);
  }
  return words;
}

std::vector<std::size_t> fraction_indices(std::size_t n, std::size_t denominator, std::uint64_t seed) {
  if (denominator == 0 || denominator > 256 || (denominator & (denominator - 1)) != 0) {
    throw ConfigError("fraction denominator must be a power of two in [1, 256], got " + std::to_string(denominator));
  }
  const std::size_t take = n / denominator;
  if (take == 0) {
    throw DataError("fraction 1/" + std::to_string(denominator) + " of " + std::to_string(n) + " examples is empty");
  }
  std::vector<std::size_t> order(n);
  for (std::size_t i = 0; i < n; ++i) order[i] = i;
  Rng rng(derive_seed(seed, "fraction"));
  rng.shuffle(order);
  order.resize(take);
  std::sort(order.begin(), order.end());
  return order;
}

std::vector<Utterance> fraction_split(const std::vector<Utterance>& utts, std::size_t denominator,
                                      std::uint64_t seed) {
  std::vector<Utterance> out;
  for (std::size_t i : fraction_indices(utts.size(), denominator, seed)) out.push_back(utts[i]);
  return out;
}

std::vector<std::string> surface_values(const std::vector<Utterance>& utts, const std::string& slot) {
  std::set<std::string> values;
  for (const Utterance& u : utts) {
    for (const SlotSpan& s : u.spans) {
      if (s.slot != slot) continue;
      std::string v;
      for (std::size_t t = s.start; t <= s.end; ++t) v += (t == s.start ? "" : " ") + u.tokens[t].text;
      values.insert(ascii_lower(v));
    }
  }
  return {values.begin(), values.end()};
}

std::vector<Utterance> substitute_entities(const std::vector<Utterance>& utts, const std::string& slot,
                                           const std::vector<std::string>& replacements, std::uint64_t seed,
                                           const std::vector<Utterance>* reference) {
  if (replacements.empty()) throw ConfigError("substitute_entities needs at least one replacement");
  std::vector<std::vector<Token>> replacement_tokens;
  for (const std::string& r : replacements) {
    replacement_tokens.push_back(tokenize(r));
    if (replacement_tokens.back().empty()) throw ConfigError("blank replacement value");
  }
  if (reference) {
    const auto known = surface_values(*reference, slot);
    std::vector<std::string> collisions;
    for (const auto& toks : replacement_tokens) {
      std::string joined;
      for (const Token& t : toks) joined += (joined.empty() ? "" : " ") + t.text;
      joined = ascii_lower(joined);
      if (std::binary_search(known.begin(), known.end(), joined)) collisions.push_back(joined);
    }
    if (!collisions.empty()) {
      std::string list;
      for (const auto& c : collisions) list += (list.empty() ? "" : ", ") + c;
      throw DataError("replacement values occur in the training data as '" + slot + "': " + list);
    }
  }

  Rng rng(derive_seed(seed, "substitute/" + slot));
  std::vector<Utterance> out;
  out.reserve(utts.size());
  for (const Utterance& utt : utts) {
    const std::u32string src = decode_utf8(utt.text);
    const std::size_t n = utt.tokens.size();
    std::vector<long> span_at(n, -1);
    for (std::size_t s = 0; s < utt.spans.size(); ++s) span_at[utt.spans[s].start] = static_cast<long>(s);

    Utterance res;
    res.lang = utt.lang;
    std::u32string text = src.substr(0, utt.tokens.front().char_start);
    std::vector<std::size_t> new_start(n), new_end(n);
    std::size_t i = 0;
    while (i < n) {
      const long s = span_at[i];
      if (s >= 0 && utt.spans[s].slot == slot) {
        const std::size_t pick = rng.uniform_index(replacements.size());
        const auto& rt = replacement_tokens[pick];
        const std::u32string rep = decode_utf8(replacements[pick]);
        const std::size_t base = text.size(), first = rt.front().char_start;
        text += rep.substr(first, rt.back().char_end - first);
        new_start[i] = res.tokens.size();
        for (const Token& t : rt) res.tokens.push_back({t.text, base + t.char_start - first, base + t.char_end - first});
        new_end[utt.spans[s].end] = res.tokens.size() - 1;
        i = utt.spans[s].end + 1;
      } else {
        const Token& t = utt.tokens[i];
        new_start[i] = new_end[i] = res.tokens.size();
        res.tokens.push_back({t.text, text.size(), text.size() + (t.char_end - t.char_start)});
        text += src.substr(t.char_start, t.char_end - t.char_start);
        ++i;
      }
      const std::size_t gap_from = utt.tokens[i - 1].char_end;
      const std::size_t gap_to = i < n ? utt.tokens[i].char_start : src.size();
      text += src.substr(gap_from, gap_to - gap_from);
    }
    res.text = encode_utf8(text);
    for (const SlotSpan& s : utt.spans) res.spans.push_back({new_start[s.start], new_end[s.end], s.slot});
    validate_utterance(res);
    out.push_back(std::move(res));
  }
  return out;
}

nlohmann::json DatasetManifest::to_json() const {
  return {{"name", name}, {"split_sizes", split_sizes}, {"slots", slots}, {"denominator", denominator},
          {"seed", seed}};
}

}  // namespace slotlab
