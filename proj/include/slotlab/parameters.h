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

#ifndef SLOTLAB_PARAMETERS_H_
#define SLOTLAB_PARAMETERS_H_

#include <cstdint>
#include <memory>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "slotlab/rng.h"
#include "slotlab/tensor.h"

namespace slotlab {

template <typename Real>
struct Parameter {
  std::string name;
  Tensor<Real> value;
  Tensor<Real> grad;
  // Excluded from weight decay when false (biases, CRF transition scores).
  bool decay = true;
};

// Named trainable tensors in insertion order. Parameter addresses are stable
// for the lifetime of the store.
template <typename Real>
class ParameterStore {
 public:
  explicit ParameterStore(std::uint64_t seed = 0) : seed_(seed) {}

  ParameterStore(const ParameterStore&) = delete;
  ParameterStore& operator=(const ParameterStore&) = delete;
  ParameterStore(ParameterStore&&) noexcept = default;
  ParameterStore& operator=(ParameterStore&&) noexcept = default;

  Parameter<Real>& add(std::string name, Tensor<Real> value, bool decay = true) {
    if (index_.contains(name)) throw ContractError("duplicate parameter name: " + name);
    auto p = std::make_unique<Parameter<Real>>();
    p->name = std::move(name);
    p->grad = Tensor<Real>::zeros(value.shape());
    p->value = std::move(value);
    p->decay = decay;
    index_.emplace(p->name, params_.size());
    params_.push_back(std::move(p));
    return *params_.back();
  }

  Parameter<Real>& get(std::string_view name) {
    auto it = index_.find(std::string(name));
    if (it == index_.end()) throw ContractError("unknown parameter: " + std::string(name));
    return *params_[it->second];
  }
  const Parameter<Real>& get(std::string_view name) const {
    return const_cast<ParameterStore*>(this)->get(name);
  }
  bool contains(std::string_view name) const { return index_.contains(std::string(name)); }

  const std::vector<std::unique_ptr<Parameter<Real>>>& items() const { return params_; }
  std::size_t size() const { return params_.size(); }

  std::size_t total_count() const {
    std::size_t n = 0;
    for (const auto& p : params_) n += p->value.size();
    return n;
  }

  void zero_grads() {
    for (auto& p : params_) p->grad.fill(Real{0});
  }

  std::uint64_t seed() const { return seed_; }
  // Initialisation stream for one parameter, independent of construction order.
  Rng init_rng(std::string_view name) const { return Rng(derive_seed(seed_, std::string("init/") + std::string(name))); }

 private:
  std::uint64_t seed_;
  std::vector<std::unique_ptr<Parameter<Real>>> params_;
  std::unordered_map<std::string, std::size_t> index_;
};

}  // namespace slotlab

#endif  // SLOTLAB_PARAMETERS_H_
