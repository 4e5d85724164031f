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

#ifndef SLOTLAB_EVAL_H_
#define SLOTLAB_EVAL_H_

#include <cstddef>
#include <map>
#include <string>
#include <vector>

#include "json.hpp"
#include "slotlab/span.h"

namespace slotlab {

struct SpanCounts {
  std::size_t tp = 0;
  std::size_t fp = 0;
  std::size_t fn = 0;

  double precision() const;
  double recall() const;
  // 0 when precision + recall == 0.
  double f1() const;
  nlohmann::ordered_json to_json() const;
};

struct EvalReport {
  std::map<std::string, SpanCounts> per_slot;
  SpanCounts micro;
  // Unweighted mean of per-slot F1 over slots seen in gold or predictions.
  double macro_f1 = 0.0;
  std::size_t num_utterances = 0;
  nlohmann::ordered_json manifest = nlohmann::ordered_json::object();

  double f1() const { return micro.f1(); }
  nlohmann::ordered_json to_json() const;
  std::string table() const;
};

// Exact (start, end, slot) matches; throws ContractError on misaligned input.
EvalReport span_f1(const std::vector<std::vector<SlotSpan>>& gold, const std::vector<std::vector<SlotSpan>>& pred);

}  // namespace slotlab

#endif  // SLOTLAB_EVAL_H_
