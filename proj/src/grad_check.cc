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

#include "slotlab/grad_check.h"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include "slotlab/rng.h"

namespace slotlab {
namespace {

double evaluate(const LossFn& loss) {
  Tape<double> tape;
  return loss(tape).value().item();
}

}  // namespace

GradCheckResult grad_check(const LossFn& loss, ParameterStore<double>& store, const GradCheckOptions& options) {
  store.zero_grads();
  {
    Tape<double> tape;
    tape.backward(loss(tape));
  }

  GradCheckResult result;
  Rng rng(options.seed);
  for (const auto& p : store.items()) {
    std::vector<std::size_t> coords(p->value.size());
    std::iota(coords.begin(), coords.end(), 0);
    if (options.max_coords_per_parameter && coords.size() > options.max_coords_per_parameter) {
      Rng local = rng.split(p->name);
      local.shuffle(coords);
      coords.resize(options.max_coords_per_parameter);
    }
    for (std::size_t i : coords) {
      const double original = p->value[i];
      p->value[i] = original + options.epsilon;
      const double plus = evaluate(loss);
      p->value[i] = original - options.epsilon;
      const double minus = evaluate(loss);
      p->value[i] = original;

      const double numeric = (plus - minus) / (2.0 * options.epsilon);
      const double analytic = p->grad[i];
      if (std::isnan(numeric) || std::isnan(analytic)) {
        throw NumericError("grad_check: NaN gradient for parameter '" + p->name + "' at index " +
                           std::to_string(i));
      }
      const double err =
          std::abs(analytic - numeric) / std::max(options.denominator_floor, std::abs(analytic) + std::abs(numeric));
      ++result.coordinates_checked;
      if (err > result.max_relative_error || result.coordinates_checked == 1) {
        result.max_relative_error = err;
        result.worst_parameter = p->name;
        result.worst_index = i;
        result.analytic = analytic;
        result.numeric = numeric;
      }
    }
  }
  return result;
}

}  // namespace slotlab
