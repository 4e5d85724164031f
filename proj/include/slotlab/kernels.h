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

#ifndef SLOTLAB_KERNELS_H_
#define SLOTLAB_KERNELS_H_

#include <cstddef>

namespace slotlab {

// Row-major GEMM: C[m, n] (+)= op(A) * op(B), where op(A) is [m, k] and
// op(B) is [k, n]. A is stored [m, k] or, when trans_a, [k, m]; likewise B.
template <typename Real>
void gemm(bool trans_a, bool trans_b, std::size_t m, std::size_t n, std::size_t k, const Real* a,
          const Real* b, Real* c, bool accumulate);

// Same, on sub-matrices with explicit row strides (leading dimensions).
template <typename Real>
void gemm_strided(bool trans_a, bool trans_b, std::size_t m, std::size_t n, std::size_t k, const Real* a,
                  std::size_t lda, const Real* b, std::size_t ldb, Real* c, std::size_t ldc, bool accumulate);

}  // namespace slotlab

#endif  // SLOTLAB_KERNELS_H_
