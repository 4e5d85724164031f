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

#include "slotlab/eval.h"

#include <algorithm>
#include <cstdio>
#include <set>

#include "slotlab/errors.h"

namespace slotlab {

double SpanCounts::precision() const { return tp + fp == 0 ? 0.0 : static_cast<double>(tp) / (tp + fp); }
double SpanCounts::recall() const { return tp + fn == 0 ? 0.0 : static_cast<double>(tp) / (tp + fn); }
double SpanCounts::f1() const {
  const double p = precision(), r = recall();
  return p + r == 0.0 ? 0.0 : 2.0 * p * r / (p + r);
}

nlohmann::ordered_json SpanCounts::to_json() const {
  return {{"tp", tp}, {"fp", fp}, {"fn", fn}, {"precision", precision()}, {"recall", recall()}, {"f1", f1()}};
}

nlohmann::ordered_json EvalReport::to_json() const {
  nlohmann::ordered_json slots = nlohmann::ordered_json::object();
  for (const auto& [slot, counts] : per_slot) slots[slot] = counts.to_json();
  return {{"micro", micro.to_json()},
          {"macro_f1", macro_f1},
          {"num_utterances", num_utterances},
          {"per_slot", slots},
          {"manifest", manifest}};
}

std::string EvalReport::table() const {
  std::size_t width = 5;
  for (const auto& [slot, _] : per_slot) width = std::max(width, slot.size());
  std::string out;
  char buf[256];
  auto line = [&](const std::string& name, const SpanCounts& c) {
    std::snprintf(buf, sizeof(buf), "%-*s %6zu %6zu %6zu %7.3f %7.3f %7.3f\n", static_cast<int>(width), name.c_str(),
                  c.tp, c.fp, c.fn, c.precision(), c.recall(), c.f1());
    out += buf;
  };
  std::snprintf(buf, sizeof(buf), "%-*s %6s %6s %6s %7s %7s %7s\n", static_cast<int>(width), "slot", "tp", "fp", "fn",
                "prec", "rec", "f1");
  out += buf;
  for (const auto& [slot, counts] : per_slot) line(slot, counts);
  line("micro", micro);
  std::snprintf(buf, sizeof(buf), "%-*s %*s %7.3f\n", static_cast<int>(width), "macro", 36, "", macro_f1);
  out += buf;
  return out;
}

EvalReport span_f1(const std::vector<std::vector<SlotSpan>>& gold, const std::vector<std::vector<SlotSpan>>& pred) {
  if (gold.size() != pred.size()) {
    throw ContractError("span_f1: " + std::to_string(gold.size()) + " gold utterances vs " +
                        std::to_string(pred.size()) + " predicted");
  }
  EvalReport report;
  report.num_utterances = gold.size();
  for (std::size_t u = 0; u < gold.size(); ++u) {
    const std::set<SlotSpan> g(gold[u].begin(), gold[u].end());
    const std::set<SlotSpan> p(pred[u].begin(), pred[u].end());
    for (const SlotSpan& s : g) {
      if (p.contains(s)) {
        ++report.per_slot[s.slot].tp;
      } else {
        ++report.per_slot[s.slot].fn;
      }
    }
    for (const SlotSpan& s : p) {
      if (!g.contains(s)) ++report.per_slot[s.slot].fp;
    }
  }
  double macro = 0.0;
  for (const auto& [slot, c] : report.per_slot) {
    report.micro.tp += c.tp;
    report.micro.fp += c.fp;
    report.micro.fn += c.fn;
    macro += c.f1();
  }
  report.macro_f1 = report.per_slot.empty() ? 0.0 : macro / report.per_slot.size();
  return report;
}

}  // namespace slotlab
