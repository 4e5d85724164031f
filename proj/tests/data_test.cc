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

#include <algorithm>
#include <filesystem>
#include <numeric>
#include <set>
#include <sstream>

#include "slotlab/data.h"
#include "slotlab/errors.h"
#include "slotlab/rng.h"
#include "slotlab/synthetic.h"

namespace slotlab {
namespace {

std::vector<std::string> texts(const std::vector<Token>& tokens) {
  std::vector<std::string> out;
  for (const Token& t : tokens) out.push_back(t.text);
  return out;
}

TEST(TokenizeTest, SplitsWhitespaceAndPeelsPunctuation) {
  auto toks = tokenize("  Hi, table for (2) at 7pm!  ");
  EXPECT_EQ(texts(toks), (std::vector<std::string>{"Hi", ",", "table", "for", "(", "2", ")", "at", "7pm", "!"}));
  EXPECT_EQ(toks[0].char_start, 2u);
  EXPECT_EQ(toks[0].char_end, 4u);
  EXPECT_EQ(toks[1].char_start, 4u);
  EXPECT_EQ(toks.back().char_end, 27u);
}

TEST(TokenizeTest, KeepsInnerPunctuationAndCase) {
  EXPECT_EQ(texts(tokenize("St. Louis o'clock 5:30.")),
            (std::vector<std::string>{"St", ".", "Louis", "o'clock", "5:30", "."}));
  EXPECT_TRUE(tokenize("   ").empty());
}

TEST(TokenizeTest, OffsetsAreCodePoints) {
  auto toks = tokenize("café à Zürich");
  ASSERT_EQ(toks.size(), 3u);
  EXPECT_EQ(toks[1].char_start, 5u);
  EXPECT_EQ(toks[2].char_start, 7u);
  EXPECT_EQ(toks[2].char_end, 13u);
}

TEST(JsonlTest, ReadsExample) {
  std::istringstream in(R"({"text":"book at noon","spans":[{"start_char":8,"end_char":12,"slot":"time"}]})"
                        "\n");
  auto utts = read_jsonl(in);
  ASSERT_EQ(utts.size(), 1u);
  EXPECT_EQ(utts[0].words(), (std::vector<std::string>{"book", "at", "noon"}));
  ASSERT_EQ(utts[0].spans.size(), 1u);
  EXPECT_EQ(utts[0].spans[0], (SlotSpan{2, 2, "time"}));
}

TEST(JsonlTest, EmptyInputGivesNoUtterances) {
  std::istringstream in("");
  EXPECT_TRUE(read_jsonl(in).empty());
  std::istringstream blank("\n\n");
  EXPECT_TRUE(read_jsonl(blank).empty());
}

TEST(JsonlTest, MidTokenSpanNamesTheLine) {
  std::istringstream in("{\"text\":\"a b\",\"spans\":[]}\n"
                        "{\"text\":\"book at noon\",\"spans\":[{\"start_char\":8,\"end_char\":11,\"slot\":\"time\"}]}\n");
  try {
    read_jsonl(in, "f.jsonl");
    FAIL() << "expected DataError";
  } catch (const DataError& e) {
    EXPECT_NE(std::string(e.what()).find("f.jsonl:2"), std::string::npos) << e.what();
  }
}

TEST(JsonlTest, MalformedAndOverlappingLinesFail) {
  std::istringstream bad("{\"text\": \n");
  EXPECT_THROW(read_jsonl(bad), DataError);
  std::istringstream overlap(
      R"({"text":"a b c","spans":[{"start_char":0,"end_char":3,"slot":"x"},{"start_char":2,"end_char":5,"slot":"y"}]})");
  EXPECT_THROW(read_jsonl(overlap), DataError);
  std::istringstream missing(R"({"spans":[]})");
  EXPECT_THROW(read_jsonl(missing), DataError);
}

TEST(JsonlTest, RoundTripPreservesEverything) {
  auto corpus = make_restaurant_corpus({});
  std::ostringstream out;
  write_jsonl(out, corpus.train);
  std::istringstream in(out.str());
  EXPECT_EQ(read_jsonl(in), corpus.train);
}

TEST(JsonlTest, KeepsAGivenTokenization) {
  // "'s" would be split into "'" and "s" by the tokenizer.
  const Utterance u = make_utterance_from_labels({"today", "'s", "weather"}, {"B-date", "O", "O"});
  std::stringstream buf;
  write_jsonl(buf, {u});
  EXPECT_NE(buf.str().find("\"tokens\":[[0,5],[6,8],[9,16]]"), std::string::npos) << buf.str();
  EXPECT_EQ(read_jsonl(buf), std::vector<Utterance>{u});

  std::stringstream plain;
  write_jsonl(plain, {make_utterance("book at noon", {})});
  EXPECT_EQ(plain.str().find("tokens"), std::string::npos);

  std::istringstream bad(R"({"text": "ab", "tokens": [[0, 3]], "spans": []})");
  EXPECT_THROW(read_jsonl(bad), DataError);
  std::istringstream split_span(R"({"text": "ab cd", "tokens": [[0, 2], [3, 5]], "spans": [{"start_char": 0, "end_char": 1, "slot": "x"}]})");
  EXPECT_THROW(read_jsonl(split_span), DataError);
}

TEST(ConllTest, ReadsBlocks) {
  std::istringstream in("from\tO\ndenver\tB-fromloc\nto\tO\nboston\tB-toloc\n\nhi\tO\n");
  auto utts = read_conll(in);
  ASSERT_EQ(utts.size(), 2u);
  EXPECT_EQ(utts[0].spans, (std::vector<SlotSpan>{{1, 1, "fromloc"}, {3, 3, "toloc"}}));
  EXPECT_EQ(utts[0].text, "from denver to boston");
  EXPECT_TRUE(utts[1].spans.empty());
}

TEST(ConllTest, UnknownPrefixNamesTheBlock) {
  std::istringstream in("a\tO\n\nb\tX-foo\n");
  try {
    read_conll(in);
    FAIL() << "expected DataError";
  } catch (const DataError& e) {
    EXPECT_NE(std::string(e.what()).find("block 2"), std::string::npos) << e.what();
  }
}

TEST(ConllTest, LenientIRepair) {
  std::istringstream in("a\tI-x\nb\tI-x\nc\tO\nd\tI-y\n");
  auto utts = read_conll(in);
  ASSERT_EQ(utts.size(), 1u);
  EXPECT_EQ(utts[0].spans, (std::vector<SlotSpan>{{0, 1, "x"}, {3, 3, "y"}}));
}

TEST(ConllTest, LoadSaveLoadIsIdentical) {
  auto utts = make_city_corpus({}).dev;
  auto dir = std::filesystem::temp_directory_path() / "slotlab_conll_test";
  std::filesystem::create_directories(dir);
  save_dataset(dir / "a.conll", utts);
  auto first = load_dataset(dir / "a.conll");
  save_dataset(dir / "b.conll", first);
  auto second = load_dataset(dir / "b.conll");
  EXPECT_EQ(first, second);
  ASSERT_EQ(first.size(), utts.size());
  for (std::size_t i = 0; i < utts.size(); ++i) {
    EXPECT_EQ(first[i].words(), utts[i].words());
    EXPECT_EQ(first[i].spans, utts[i].spans);
  }
  std::filesystem::remove_all(dir);
}

TEST(BioTest, ExamplesAndRoundTrip) {
  auto utt = make_utterance_from_labels({"from", "new", "york", "to", "rome"}, {"O", "B-a", "I-a", "O", "B-b"});
  EXPECT_EQ(bio_labels(utt), (std::vector<std::string>{"O", "B-a", "I-a", "O", "B-b"}));
  TagSet tags = build_tagset({utt});
  auto ids = bio_from_spans(utt, tags);
  EXPECT_EQ(spans_from_bio(ids, tags), utt.spans);
  auto empty = make_utterance_from_labels({"x", "y"}, {"O", "O"});
  EXPECT_EQ(bio_from_spans(empty, tags), (std::vector<std::size_t>{0, 0}));
}

TEST(BioTest, RoundTripOverSyntheticCorpora) {
  auto corpus = make_restaurant_corpus({});
  TagSet tags = build_tagset(corpus.train);
  for (const Utterance& u : corpus.test) {
    EXPECT_EQ(spans_from_bio(bio_from_spans(u, tags), tags), u.spans) << u.text;
  }
}

TEST(BioTest, OverlapIsRejected) {
  auto utt = make_utterance_from_labels({"a", "b", "c"}, {"B-x", "I-x", "O"});
  utt.spans.push_back({1, 2, "y"});
  EXPECT_THROW(bio_from_spans(utt, build_tagset({})), DataError);
}

TEST(FractionTest, TableSizesAndNesting) {
  const std::size_t n = 8198;
  const std::vector<std::size_t> expected = {8198, 4099, 2049, 1024, 512, 256, 128, 64, 32};
  std::vector<std::size_t> previous;
  for (std::size_t i = 0, d = 1; d <= 256; ++i, d *= 2) {
    auto idx = fraction_indices(n, d, 7);
    EXPECT_EQ(idx.size(), expected[i]) << "d=" << d;
    EXPECT_TRUE(std::is_sorted(idx.begin(), idx.end()));
    if (!previous.empty()) {
      EXPECT_TRUE(std::includes(previous.begin(), previous.end(), idx.begin(), idx.end())) << "d=" << d;
    }
    previous = idx;
  }
}

TEST(FractionTest, DeterministicAndSeedDependent) {
  EXPECT_EQ(fraction_indices(1000, 8, 3), fraction_indices(1000, 8, 3));
  EXPECT_NE(fraction_indices(1000, 8, 3), fraction_indices(1000, 8, 4));
  std::vector<std::size_t> all(50);
  std::iota(all.begin(), all.end(), 0);
  EXPECT_EQ(fraction_indices(50, 1, 9), all);
}

TEST(FractionTest, InvalidDenominatorsAndEmptyResults) {
  EXPECT_THROW(fraction_indices(100, 3, 0), ConfigError);
  EXPECT_THROW(fraction_indices(100, 512, 0), ConfigError);
  EXPECT_THROW(fraction_indices(100, 0, 0), ConfigError);
  EXPECT_THROW(fraction_indices(100, 128, 0), DataError);
}

TEST(FractionTest, SplitSelectsUtterances) {
  auto corpus = make_city_corpus({});
  auto sub = fraction_split(corpus.train, 8, 1);
  auto idx = fraction_indices(corpus.train.size(), 8, 1);
  ASSERT_EQ(sub.size(), idx.size());
  for (std::size_t i = 0; i < idx.size(); ++i) EXPECT_EQ(sub[i], corpus.train[idx[i]]);
}

// Rebuilds words and spans from scratch: each target span's words are replaced
// by the replacement's words and every index after it shifts accordingly.
struct Rebuilt {
  std::vector<std::string> words;
  std::vector<SlotSpan> spans;
};

Rebuilt substitution_oracle(const Utterance& u, const std::string& slot, const std::string& replacement) {
  std::vector<std::string> rep_words;
  std::istringstream in(replacement);
  for (std::string w; in >> w;) rep_words.push_back(w);
  Rebuilt out;
  const auto words = u.words();
  std::size_t t = 0;
  for (const SlotSpan& s : u.spans) {
    while (t < s.start) out.words.push_back(words[t++]);
    const std::size_t start = out.words.size();
    if (s.slot == slot) {
      out.words.insert(out.words.end(), rep_words.begin(), rep_words.end());
    } else {
      for (std::size_t k = s.start; k <= s.end; ++k) out.words.push_back(words[k]);
    }
    out.spans.push_back({start, out.words.size() - 1, s.slot});
    t = s.end + 1;
  }
  while (t < words.size()) out.words.push_back(words[t++]);
  return out;
}

TEST(SubstituteTest, NoTargetSpansLeavesDataUnchanged) {
  auto utts = make_restaurant_corpus({}).dev;
  EXPECT_EQ(substitute_entities(utts, "from_city", {"zagreb"}, 1), utts);
}

TEST(SubstituteTest, SingleWordReplacement) {
  auto utt = make_utterance("fly to boston now", {{7, 13, "to_city"}});
  auto out = substitute_entities({utt}, "to_city", {"zagreb"}, 0);
  ASSERT_EQ(out.size(), 1u);
  EXPECT_EQ(out[0].text, "fly to zagreb now");
  EXPECT_EQ(out[0].spans, (std::vector<SlotSpan>{{2, 2, "to_city"}}));
  EXPECT_EQ(char_spans(out[0]), (std::vector<CharSpan>{{7, 13, "to_city"}}));
}

TEST(SubstituteTest, MultiWordShiftsLaterSpansAgainstOracle) {
  auto corpus = make_city_corpus({});
  std::size_t checked = 0;
  for (const std::string& slot : {std::string("from_city"), std::string("to_city")}) {
    auto out = substitute_entities(corpus.test, slot, {"new york"}, 5);
    ASSERT_EQ(out.size(), corpus.test.size());
    for (std::size_t i = 0; i < out.size(); ++i) {
      Rebuilt want = substitution_oracle(corpus.test[i], slot, "new york");
      EXPECT_EQ(out[i].words(), want.words) << corpus.test[i].text;
      EXPECT_EQ(out[i].spans, want.spans) << corpus.test[i].text;
      EXPECT_NO_THROW(validate_utterance(out[i]));
      ++checked;
    }
  }
  EXPECT_GT(checked, 0u);
  auto utt = make_utterance("from rome to paris", {{5, 9, "from_city"}, {13, 18, "to_city"}});
  auto out = substitute_entities({utt}, "from_city", {"new york"}, 0);
  EXPECT_EQ(out[0].text, "from new york to paris");
  EXPECT_EQ(out[0].spans, (std::vector<SlotSpan>{{1, 2, "from_city"}, {4, 4, "to_city"}}));
}

TEST(SubstituteTest, PreservesCountsAndIsDeterministic) {
  auto corpus = make_city_corpus({});
  auto a = substitute_entities(corpus.train, "to_city", heldout_cities(), 11);
  auto b = substitute_entities(corpus.train, "to_city", heldout_cities(), 11);
  EXPECT_EQ(a, b);
  ASSERT_EQ(a.size(), corpus.train.size());
  const auto held_list = heldout_cities();
  std::set<std::string> held(held_list.begin(), held_list.end());
  for (std::size_t i = 0; i < a.size(); ++i) {
    ASSERT_EQ(a[i].spans.size(), corpus.train[i].spans.size());
    for (std::size_t s = 0; s < a[i].spans.size(); ++s) EXPECT_EQ(a[i].spans[s].slot, corpus.train[i].spans[s].slot);
  }
  for (const std::string& v : surface_values(a, "to_city")) EXPECT_TRUE(held.count(v)) << v;
}

TEST(SubstituteTest, CollisionsWithReferenceAreListed) {
  auto corpus = make_city_corpus({});
  try {
    substitute_entities(corpus.test, "to_city", {"boston", "zagreb", "denver"}, 0, &corpus.train);
    FAIL() << "expected DataError";
  } catch (const DataError& e) {
    const std::string msg = e.what();
    EXPECT_NE(msg.find("boston"), std::string::npos) << msg;
    EXPECT_NE(msg.find("denver"), std::string::npos) << msg;
    EXPECT_EQ(msg.find("zagreb"), std::string::npos) << msg;
  }
  EXPECT_NO_THROW(substitute_entities(corpus.test, "to_city", heldout_cities(), 0, &corpus.train));
  EXPECT_THROW(substitute_entities(corpus.test, "to_city", {}, 0), ConfigError);
}

TEST(UtteranceTest, ValidationRejectsBadSpans) {
  EXPECT_THROW(make_utterance("a b", {{0, 2, "x"}}), DataError);
  EXPECT_THROW(make_utterance("a b", {{0, 0, "x"}}), DataError);
  EXPECT_THROW(make_utterance("a b", {{2, 9, "x"}}), DataError);
  Utterance u = make_utterance("a b", {});
  u.spans.push_back({1, 5, "x"});
  EXPECT_THROW(validate_utterance(u), DataError);
}

TEST(ManifestTest, Serializes) {
  DatasetManifest m{"toy", {{"train", 3}}, {"time"}, 4, 9};
  auto j = m.to_json();
  EXPECT_EQ(j["name"], "toy");
  EXPECT_EQ(j["denominator"], 4);
  EXPECT_EQ(j["split_sizes"]["train"], 3);
}

}  // namespace
}  // namespace slotlab
