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

#ifndef SLOTLAB_DATA_H_
#define SLOTLAB_DATA_H_

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"
#include "slotlab/crf.h"
#include "slotlab/span.h"

namespace slotlab {

// Offsets are code points into Utterance::text; char_end is exclusive.
struct Token {
  std::string text;
  std::size_t char_start = 0;
  std::size_t char_end = 0;

  bool operator==(const Token&) const = default;
};

struct Utterance {
  std::string text;
  std::vector<Token> tokens;
  std::vector<SlotSpan> spans;  // token indices, sorted by start
  std::string lang;

  std::vector<std::string> words() const;
  bool operator==(const Utterance&) const = default;
};

// Code-point range of a span.
struct CharSpan {
  std::size_t start_char = 0;
  std::size_t end_char = 0;  // exclusive
  std::string slot;

  bool operator==(const CharSpan&) const = default;
};

bool is_token_punctuation(char32_t c);

// Whitespace split, then leading and trailing punctuation peeled off one
// character at a time. No case folding.
std::vector<Token> tokenize(std::string_view text);

// Throws DataError when a span does not align with token boundaries, is
// empty, out of range, or overlaps another span.
Utterance make_utterance(std::string text, const std::vector<CharSpan>& char_spans, std::string lang = "");
// Keeps a given tokenization, e.g. for text that has no spaces between words.
Utterance make_utterance(std::string text, std::vector<Token> tokens, const std::vector<CharSpan>& char_spans,
                         std::string lang = "");
// Pre-tokenized input: text is the tokens joined by single spaces.
Utterance make_utterance_from_labels(const std::vector<std::string>& tokens, const std::vector<std::string>& labels,
                                     std::string lang = "");
std::vector<CharSpan> char_spans(const Utterance& utt);
// Checks the invariants listed on Utterance; throws DataError.
void validate_utterance(const Utterance& utt);

// One object per line: {"text", "spans": [{"start_char", "end_char", "slot"}],
// "lang"?, "tokens"?}. "tokens" holds [start_char, end_char] pairs and is only
// written when the stored tokens differ from tokenize(text).
std::vector<Utterance> read_jsonl(std::istream& in, const std::string& source = "<stream>");
void write_jsonl(std::ostream& out, const std::vector<Utterance>& utts);
std::vector<Utterance> load_jsonl(const std::filesystem::path& path);
void save_jsonl(const std::filesystem::path& path, const std::vector<Utterance>& utts);

std::vector<Utterance> read_conll(std::istream& in, const std::string& source = "<stream>");
void write_conll(std::ostream& out, const std::vector<Utterance>& utts);
std::vector<Utterance> load_conll(const std::filesystem::path& path);
void save_conll(const std::filesystem::path& path, const std::vector<Utterance>& utts);

// Picks the reader from the extension (.conll/.bio/.txt -> CoNLL, otherwise JSONL).
std::vector<Utterance> load_dataset(const std::filesystem::path& path);
void save_dataset(const std::filesystem::path& path, const std::vector<Utterance>& utts);

std::vector<std::string> bio_labels(const Utterance& utt);
std::vector<std::size_t> bio_from_spans(const Utterance& utt, const TagSet& tagset);

TagSet build_tagset(const std::vector<Utterance>& utts);
std::vector<std::string> collect_words(const std::vector<Utterance>& utts);

// Seeded shuffle of all indices, prefix of floor(n / denominator), returned in
// ascending order. Prefixes make smaller fractions nested in larger ones.
std::vector<std::size_t> fraction_indices(std::size_t n, std::size_t denominator, std::uint64_t seed);
std::vector<Utterance> fraction_split(const std::vector<Utterance>& utts, std::size_t denominator,
                                      std::uint64_t seed);

// Lower-cased surface strings of every span with the given slot type.
std::vector<std::string> surface_values(const std::vector<Utterance>& utts, const std::string& slot);

// Replaces each span of `slot` with a uniformly drawn replacement. When
// `reference` is given, replacements that occur there as surface forms of the
// slot are rejected with a DataError listing them.
std::vector<Utterance> substitute_entities(const std::vector<Utterance>& utts, const std::string& slot,
                                           const std::vector<std::string>& replacements, std::uint64_t seed,
                                           const std::vector<Utterance>* reference = nullptr);

struct DatasetManifest {
  std::string name;
  std::map<std::string, std::size_t> split_sizes;
  std::vector<std::string> slots;
  std::size_t denominator = 1;
  std::uint64_t seed = 0;

  nlohmann::json to_json() const;
};

}  // namespace slotlab

#endif  // SLOTLAB_DATA_H_
