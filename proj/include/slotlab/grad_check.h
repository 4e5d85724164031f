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

#ifndef SLOTLAB_GRAD_CHECK_H_
#define SLOTLAB_GRAD_CHECK_H_

#include <cstddef>
#include <functional>
#include <string>

#include "slotlab/autodiff.h"

namespace slotlab {

struct GradCheckOptions {
  double epsilon = 1e-5;
  // 0 checks every coordinate; otherwise a seeded sample per parameter.
  std::size_t max_coords_per_parameter = 0;
  std::uint64_t seed = 0;
  // Lower bound on the relative-error denominator. Central differences carry
  // roughly |loss| * 1e-16 / epsilon of rounding noise, so coordinates whose
  // gradient is below a few multiples of that cannot be resolved.
  double denominator_floor = 1e-8;
};

struct GradCheckResult {
  double max_relative_error = 0.0;
  std::string worst_parameter;
  std::size_t worst_index = 0;
  double analytic = 0.0;
  double numeric = 0.0;
  std::size_t coordinates_checked = 0;
};

using LossFn = std::function<Var<double>(Tape<double>&)>;

// Compares tape gradients of `loss` against central finite differences over
// every parameter in `store`. Relative error per coordinate is
// |analytic - numeric| / max(denominator_floor, |analytic| + |numeric|).
// `loss` must be deterministic (dropout off). Throws NumericError naming the
// parameter when a NaN shows up in either gradient.
GradCheckResult grad_check(const LossFn& loss, ParameterStore<double>& store, const GradCheckOptions& options = {});

}  // namespace slotlab

#endif  // SLOTLAB_GRAD_CHECK_H_
