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

#ifndef SLOTLAB_SPAN_H_
#define SLOTLAB_SPAN_H_

#include <compare>
#include <cstddef>
#include <string>

namespace slotlab {

// Token-indexed slot value; end is inclusive.
struct SlotSpan {
  std::size_t start = 0;
  std::size_t end = 0;
  std::string slot;

  auto operator<=>(const SlotSpan&) const = default;
  bool operator==(const SlotSpan&) const = default;
};

}  // namespace slotlab

#endif  // SLOTLAB_SPAN_H_
