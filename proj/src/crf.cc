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

#include "slotlab/crf.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>

namespace slotlab {

TagSet::TagSet(const std::vector<std::string>& slot_types) {
  std::set<std::string> unique(slot_types.begin(), slot_types.end());
  slots_.assign(unique.begin(), unique.end());
  tags_.push_back("O");
  for (std::size_t s = 0; s < slots_.size(); ++s) {
    if (slots_[s].empty()) throw DataError("empty slot type name");
    slot_index_.emplace(slots_[s], s);
    tags_.push_back("B-" + slots_[s]);
    tags_.push_back("I-" + slots_[s]);
  }
  for (std::size_t i = 0; i < tags_.size(); ++i) tag_index_.emplace(tags_[i], i);
}

TagSet TagSet::from_tags(const std::vector<std::string>& tags) {
  std::vector<std::string> slots;
  for (std::size_t i = 1; i < tags.size(); i += 2) {
    if (tags[i].rfind("B-", 0) != 0) throw DataError("malformed tag list at '" + tags[i] + "'");
    slots.push_back(tags[i].substr(2));
  }
  TagSet result(slots);
  if (result.tags_ != tags) throw DataError("tag list is not in canonical O, B-x, I-x order");
  return result;
}

std::size_t TagSet::index(const std::string& tag) const {
  auto it = tag_index_.find(tag);
  if (it == tag_index_.end()) throw ContractError("unknown tag '" + tag + "'");
  return it->second;
}

std::size_t TagSet::begin_tag(const std::string& slot) const {
  auto it = slot_index_.find(slot);
  if (it == slot_index_.end()) throw ContractError("unknown slot type '" + slot + "'");
  return 1 + 2 * it->second;
}

std::size_t TagSet::inside_tag(const std::string& slot) const { return begin_tag(slot) + 1; }

std::vector<SlotSpan> spans_from_labels(const std::vector<std::string>& labels) {
  std::vector<SlotSpan> spans;
  bool open = false;
  for (std::size_t t = 0; t < labels.size(); ++t) {
    const std::string& label = labels[t];
    if (label == "O") {
      open = false;
      continue;
    }
    if (label.size() < 3 || label[1] != '-' || (label[0] != 'B' && label[0] != 'I')) {
      throw DataError("unrecognised BIO label '" + label + "'");
    }
    const std::string slot = label.substr(2);
    if (label[0] == 'I' && open && spans.back().slot == slot) {
      spans.back().end = t;
      continue;
    }
    spans.push_back({t, t, slot});
    open = true;
  }
  return spans;
}

std::vector<SlotSpan> spans_from_bio(const std::vector<std::size_t>& tags, const TagSet& tagset) {
  std::vector<std::string> labels;
  labels.reserve(tags.size());
  for (std::size_t t : tags) {
    if (t >= tagset.size()) throw ContractError("tag index " + std::to_string(t) + " outside tag set");
    labels.push_back(tagset.tag(t));
  }
  return spans_from_labels(labels);
}

// ---------------------------------------------------------------------------

namespace {

template <typename Real>
void check_crf_shapes(const Tensor<Real>& emissions, const Tensor<Real>& transitions, const Tensor<Real>& start,
                      const Tensor<Real>& end) {
  if (emissions.rank() != 2) throw DimensionError("crf: emissions must be [T, K], got " + shape_string(emissions.shape()));
  const std::size_t k = emissions.dim(1);
  if (transitions.shape() != Shape{k, k} || start.shape() != Shape{k} || end.shape() != Shape{k}) {
    throw DimensionError("crf: transition/start/end shapes do not match " + std::to_string(k) + " tags");
  }
}

template <typename Real>
void check_path(const std::vector<std::size_t>& path, std::size_t length, std::size_t k) {
  if (path.size() != length) {
    throw ContractError("crf: tag sequence of length " + std::to_string(path.size()) + " for " +
                        std::to_string(length) + " positions");
  }
  for (std::size_t y : path) {
    if (y >= k) throw ContractError("crf: tag index " + std::to_string(y) + " outside " + std::to_string(k) + " tags");
  }
}

template <typename Real>
Real log_sum_exp(const Real* values, std::size_t n) {
  const Real mx = *std::max_element(values, values + n);
  if (!std::isfinite(mx)) return mx;
  Real total = 0;
  for (std::size_t i = 0; i < n; ++i) total += std::exp(values[i] - mx);
  return mx + std::log(total);
}

// alpha[t][y]: log-sum over prefixes ending in y at t (emission included).
template <typename Real>
Tensor<Real> forward_scores(const Tensor<Real>& em, const Tensor<Real>& tr, const Tensor<Real>& start) {
  const std::size_t n = em.dim(0), k = em.dim(1);
  Tensor<Real> alpha({n, k});
  for (std::size_t y = 0; y < k; ++y) alpha.at(0, y) = start[y] + em.at(0, y);
  std::vector<Real> buf(k);
  for (std::size_t t = 1; t < n; ++t) {
    for (std::size_t y = 0; y < k; ++y) {
      for (std::size_t p = 0; p < k; ++p) buf[p] = alpha.at(t - 1, p) + tr.at(p, y);
      alpha.at(t, y) = log_sum_exp(buf.data(), k) + em.at(t, y);
    }
  }
  return alpha;
}

// beta[t][y]: log-sum over suffixes after t given y at t (end score included).
template <typename Real>
Tensor<Real> backward_scores(const Tensor<Real>& em, const Tensor<Real>& tr, const Tensor<Real>& end) {
  const std::size_t n = em.dim(0), k = em.dim(1);
  Tensor<Real> beta({n, k});
  for (std::size_t y = 0; y < k; ++y) beta.at(n - 1, y) = end[y];
  std::vector<Real> buf(k);
  for (std::size_t t = n - 1; t-- > 0;) {
    for (std::size_t y = 0; y < k; ++y) {
      for (std::size_t q = 0; q < k; ++q) buf[q] = tr.at(y, q) + em.at(t + 1, q) + beta.at(t + 1, q);
      beta.at(t, y) = log_sum_exp(buf.data(), k);
    }
  }
  return beta;
}

}  // namespace

template <typename Real>
Real crf_path_score(const Tensor<Real>& emissions, const Tensor<Real>& transitions, const Tensor<Real>& start,
                    const Tensor<Real>& end, const std::vector<std::size_t>& path) {
  check_crf_shapes(emissions, transitions, start, end);
  check_path<Real>(path, emissions.dim(0), emissions.dim(1));
  Real score = start[path[0]] + emissions.at(0, path[0]);
  for (std::size_t t = 1; t < path.size(); ++t) {
    score = score + transitions.at(path[t - 1], path[t]) + emissions.at(t, path[t]);
  }
  return score + end[path.back()];
}

template <typename Real>
Real crf_log_partition(const Tensor<Real>& emissions, const Tensor<Real>& transitions, const Tensor<Real>& start,
                       const Tensor<Real>& end) {
  check_crf_shapes(emissions, transitions, start, end);
  const Tensor<Real> alpha = forward_scores(emissions, transitions, start);
  const std::size_t n = emissions.dim(0), k = emissions.dim(1);
  std::vector<Real> buf(k);
  for (std::size_t y = 0; y < k; ++y) buf[y] = alpha.at(n - 1, y) + end[y];
  return log_sum_exp(buf.data(), k);
}

template <typename Real>
ViterbiResult<Real> viterbi(const Tensor<Real>& emissions, const Tensor<Real>& transitions, const Tensor<Real>& start,
                            const Tensor<Real>& end) {
  check_crf_shapes(emissions, transitions, start, end);
  const std::size_t n = emissions.dim(0), k = emissions.dim(1);
  std::vector<Real> delta(k), next(k);
  std::vector<std::size_t> backptr(n * k, 0);
  for (std::size_t y = 0; y < k; ++y) delta[y] = start[y] + emissions.at(0, y);
  for (std::size_t t = 1; t < n; ++t) {
    for (std::size_t y = 0; y < k; ++y) {
      std::size_t best = 0;
      Real best_score = delta[0] + transitions.at(0, y);
      for (std::size_t p = 1; p < k; ++p) {
        const Real s = delta[p] + transitions.at(p, y);
        if (s > best_score) {
          best_score = s;
          best = p;
        }
      }
      next[y] = best_score + emissions.at(t, y);
      backptr[t * k + y] = best;
    }
    std::swap(delta, next);
  }
  ViterbiResult<Real> result;
  std::size_t last = 0;
  result.score = delta[0] + end[0];
  for (std::size_t y = 1; y < k; ++y) {
    const Real s = delta[y] + end[y];
    if (s > result.score) {
      result.score = s;
      last = y;
    }
  }
  result.tags.assign(n, 0);
  result.tags[n - 1] = last;
  for (std::size_t t = n - 1; t > 0; --t) result.tags[t - 1] = backptr[t * k + result.tags[t]];
  return result;
}

template <typename Real>
Var<Real> crf_nll(Var<Real> emissions, Var<Real> transitions, Var<Real> start, Var<Real> end,
                  const std::vector<std::size_t>& gold) {
  const Tensor<Real>& em = emissions.value();
  check_crf_shapes(em, transitions.value(), start.value(), end.value());
  check_path<Real>(gold, em.dim(0), em.dim(1));
  const Real log_z = crf_log_partition(em, transitions.value(), start.value(), end.value());
  const Real gold_score = crf_path_score(em, transitions.value(), start.value(), end.value(), gold);
  const std::size_t ie = emissions.id(), it = transitions.id(), is = start.id(), iend = end.id();
  return emissions.tape()->record(
      Tensor<Real>::scalar(log_z - gold_score), {emissions, transitions, start, end},
      [=](Tape<Real>& tape, const Tensor<Real>&, const Tensor<Real>& g) {
        const Tensor<Real>& e = tape.value(ie);
        const Tensor<Real>& tr = tape.value(it);
        const std::size_t n = e.dim(0), k = e.dim(1);
        const Tensor<Real> alpha = forward_scores(e, tr, tape.value(is));
        const Tensor<Real> beta = backward_scores(e, tr, tape.value(iend));
        const Real upstream = g[0];
        if (tape.requires_grad(ie)) {
          Tensor<Real>& d = tape.grad(ie);
          for (std::size_t t = 0; t < n; ++t) {
            for (std::size_t y = 0; y < k; ++y) d.at(t, y) += upstream * std::exp(alpha.at(t, y) + beta.at(t, y) - log_z);
            d.at(t, gold[t]) -= upstream;
          }
        }
        if (tape.requires_grad(it)) {
          Tensor<Real>& d = tape.grad(it);
          for (std::size_t t = 1; t < n; ++t) {
            for (std::size_t p = 0; p < k; ++p) {
              for (std::size_t y = 0; y < k; ++y) {
                d.at(p, y) += upstream * std::exp(alpha.at(t - 1, p) + tr.at(p, y) + e.at(t, y) + beta.at(t, y) - log_z);
              }
            }
            d.at(gold[t - 1], gold[t]) -= upstream;
          }
        }
        if (tape.requires_grad(is)) {
          Tensor<Real>& d = tape.grad(is);
          for (std::size_t y = 0; y < k; ++y) d[y] += upstream * std::exp(alpha.at(0, y) + beta.at(0, y) - log_z);
          d[gold[0]] -= upstream;
        }
        if (tape.requires_grad(iend)) {
          Tensor<Real>& d = tape.grad(iend);
          for (std::size_t y = 0; y < k; ++y) {
            d[y] += upstream * std::exp(alpha.at(n - 1, y) + beta.at(n - 1, y) - log_z);
          }
          d[gold[n - 1]] -= upstream;
        }
      });
}

// ---------------------------------------------------------------------------

template <typename Real>
CrfHead<Real>::CrfHead(ParameterStore<Real>& store, const std::string& name, std::size_t d_model,
                       std::size_t num_tags)
    : num_tags_(num_tags), emission_(store, name + ".emission", d_model, num_tags, Activation::kNone) {
  if (num_tags == 0) throw ConfigError("CRF needs at least one tag");
  transitions_ = &store.add(name + ".transitions", Tensor<Real>({num_tags, num_tags}), /*decay=*/false);
  start_ = &store.add(name + ".start", Tensor<Real>({num_tags}), /*decay=*/false);
  end_ = &store.add(name + ".end", Tensor<Real>({num_tags}), /*decay=*/false);
}

template <typename Real>
Var<Real> CrfHead<Real>::emissions(Tape<Real>& tape, Var<Real> hidden) const {
  return emission_.forward(tape, hidden);
}

template <typename Real>
Var<Real> CrfHead<Real>::nll(Tape<Real>& tape, Var<Real> hidden, const std::vector<std::size_t>& gold) const {
  return crf_nll(emissions(tape, hidden), tape.parameter(*transitions_), tape.parameter(*start_),
                 tape.parameter(*end_), gold);
}

template <typename Real>
ViterbiResult<Real> CrfHead<Real>::viterbi(Tape<Real>& tape, Var<Real> hidden) const {
  return decode(emissions(tape, hidden).value());
}

template <typename Real>
ViterbiResult<Real> CrfHead<Real>::decode(const Tensor<Real>& emissions) const {
  return slotlab::viterbi(emissions, transitions_->value, start_->value, end_->value);
}

#define SLOTLAB_INSTANTIATE_CRF(Real)                                                                        \
  template Real crf_path_score(const Tensor<Real>&, const Tensor<Real>&, const Tensor<Real>&,                \
                               const Tensor<Real>&, const std::vector<std::size_t>&);                         \
  template Real crf_log_partition(const Tensor<Real>&, const Tensor<Real>&, const Tensor<Real>&,             \
                                  const Tensor<Real>&);                                                      \
  template ViterbiResult<Real> viterbi(const Tensor<Real>&, const Tensor<Real>&, const Tensor<Real>&,        \
                                       const Tensor<Real>&);                                                 \
  template Var<Real> crf_nll(Var<Real>, Var<Real>, Var<Real>, Var<Real>, const std::vector<std::size_t>&);   \
  template class CrfHead<Real>;

SLOTLAB_INSTANTIATE_CRF(float)
SLOTLAB_INSTANTIATE_CRF(double)

}  // namespace slotlab
