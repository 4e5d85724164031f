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

#ifndef SLOTLAB_CRF_H_
#define SLOTLAB_CRF_H_

#include <cstddef>
#include <string>
#include <unordered_map>
#include <vector>

#include "slotlab/autodiff.h"
#include "slotlab/layers.h"
#include "slotlab/span.h"

namespace slotlab {

// BIO tag inventory: index 0 is "O", then B-<slot>, I-<slot> for each slot
// type in sorted order.
class TagSet {
 public:
  TagSet() : TagSet(std::vector<std::string>{}) {}
  explicit TagSet(const std::vector<std::string>& slot_types);
  // Rebuilds from a serialized tag list; validates the layout.
  static TagSet from_tags(const std::vector<std::string>& tags);

  std::size_t size() const { return tags_.size(); }
  const std::vector<std::string>& tags() const { return tags_; }
  const std::vector<std::string>& slot_types() const { return slots_; }
  const std::string& tag(std::size_t index) const { return tags_.at(index); }
  // Throws ContractError for unknown tags.
  std::size_t index(const std::string& tag) const;
  bool contains_slot(const std::string& slot) const { return slot_index_.contains(slot); }
  std::size_t begin_tag(const std::string& slot) const;
  std::size_t inside_tag(const std::string& slot) const;

  bool operator==(const TagSet& other) const { return tags_ == other.tags_; }

 private:
  std::vector<std::string> slots_;
  std::vector<std::string> tags_;
  std::unordered_map<std::string, std::size_t> tag_index_;
  std::unordered_map<std::string, std::size_t> slot_index_;
};

// Maximal B-X (I-X)* runs become spans. An I-X that does not continue an
// open X span starts a new one (lenient repair). Throws DataError for labels
// that are not O, B-*, or I-*.
std::vector<SlotSpan> spans_from_labels(const std::vector<std::string>& labels);
std::vector<SlotSpan> spans_from_bio(const std::vector<std::size_t>& tags, const TagSet& tagset);

// ---------------------------------------------------------------------------
// Linear-chain scoring. emissions [T, K]; transitions [K, K] indexed
// (from, to); start and end [K].

template <typename Real>
Real crf_path_score(const Tensor<Real>& emissions, const Tensor<Real>& transitions, const Tensor<Real>& start,
                    const Tensor<Real>& end, const std::vector<std::size_t>& path);

// log of the sum of exp(path score) over all K^T paths (forward algorithm).
template <typename Real>
Real crf_log_partition(const Tensor<Real>& emissions, const Tensor<Real>& transitions, const Tensor<Real>& start,
                       const Tensor<Real>& end);

template <typename Real>
struct ViterbiResult {
  std::vector<std::size_t> tags;
  Real score = 0;
};

// Ties are broken towards the lowest tag index at every step.
template <typename Real>
ViterbiResult<Real> viterbi(const Tensor<Real>& emissions, const Tensor<Real>& transitions, const Tensor<Real>& start,
                            const Tensor<Real>& end);

// log Z - score(gold) as a differentiable scalar.
template <typename Real>
Var<Real> crf_nll(Var<Real> emissions, Var<Real> transitions, Var<Real> start, Var<Real> end,
                  const std::vector<std::size_t>& gold);

template <typename Real>
class CrfHead {
 public:
  CrfHead(ParameterStore<Real>& store, const std::string& name, std::size_t d_model, std::size_t num_tags);

  Var<Real> emissions(Tape<Real>& tape, Var<Real> hidden) const;
  Var<Real> nll(Tape<Real>& tape, Var<Real> hidden, const std::vector<std::size_t>& gold) const;
  ViterbiResult<Real> viterbi(Tape<Real>& tape, Var<Real> hidden) const;
  ViterbiResult<Real> decode(const Tensor<Real>& emissions) const;

  std::size_t num_tags() const { return num_tags_; }
  Parameter<Real>& transitions() const { return *transitions_; }
  Parameter<Real>& start() const { return *start_; }
  Parameter<Real>& end() const { return *end_; }

 private:
  std::size_t num_tags_;
  DenseLayer<Real> emission_;
  Parameter<Real>* transitions_;
  Parameter<Real>* start_;
  Parameter<Real>* end_;
};

}  // namespace slotlab

#endif  // SLOTLAB_CRF_H_
