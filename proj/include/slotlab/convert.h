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


#ifndef SLOTLAB_CONVERT_H_
#define SLOTLAB_CONVERT_H_

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "slotlab/data.h"

namespace slotlab {

// Thin readers for the layouts the public corpora ship in. All of them throw
// DataError with the source and record number on malformed input.

// JSON array of {"userInput": {"text"}, "labels": [{"slot", "valueSpan":
// {"startIndex", "endIndex"}}]}. A missing startIndex means 0. Offsets are
// code points.
std::vector<Utterance> read_restaurants8k(std::istream& in, const std::string& source = "<stream>");

// One utterance per line: "BOS w1 .. wn EOS<TAB>O t1 .. tn intent". The
// intent label is dropped.
std::vector<Utterance> read_atis(std::istream& in, const std::string& source = "<stream>");

// Tab-separated: id, intent, slots ("start:end:TYPE" comma list, code-point
// offsets), utterance, domain, locale, decoupled form, tokens JSON. When the
// tokens column is present its tokenization is used, otherwise the text is
// tokenized here.
std::vector<Utterance> read_mtop(std::istream& in, const std::string& source = "<stream>");

enum class NativeFormat { kRestaurants8k, kAtis, kMtop };
NativeFormat parse_native_format(const std::string& name);
std::vector<Utterance> load_native(const std::filesystem::path& path, NativeFormat format);

}  // namespace slotlab

#endif  // SLOTLAB_CONVERT_H_
