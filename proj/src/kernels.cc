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

#include "slotlab/kernels.h"

#include <Eigen/Core>

namespace slotlab {
namespace {

template <typename Real>
using RowMajor = Eigen::Matrix<Real, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using Stride = Eigen::OuterStride<>;
template <typename Real>
using ConstMap = Eigen::Map<const RowMajor<Real>, Eigen::Unaligned, Stride>;
template <typename Real>
using MutMap = Eigen::Map<RowMajor<Real>, Eigen::Unaligned, Stride>;

template <typename Real, typename Lhs, typename Rhs>
void assign(MutMap<Real>& c, const Lhs& lhs, const Rhs& rhs, bool accumulate) {
  if (accumulate) {
    c.noalias() += lhs * rhs;
  } else {
    c.noalias() = lhs * rhs;
  }
}

}  // namespace

template <typename Real>
void gemm_strided(bool trans_a, bool trans_b, std::size_t m, std::size_t n, std::size_t k, const Real* a,
                  std::size_t lda, const Real* b, std::size_t ldb, Real* c, std::size_t ldc, bool accumulate) {
  const auto M = static_cast<Eigen::Index>(m);
  const auto N = static_cast<Eigen::Index>(n);
  const auto K = static_cast<Eigen::Index>(k);
  const Stride sa(static_cast<Eigen::Index>(lda));
  const Stride sb(static_cast<Eigen::Index>(ldb));
  MutMap<Real> cm(c, M, N, Stride(static_cast<Eigen::Index>(ldc)));
  if (!trans_a && !trans_b) {
    assign<Real>(cm, ConstMap<Real>(a, M, K, sa), ConstMap<Real>(b, K, N, sb), accumulate);
  } else if (!trans_a && trans_b) {
    assign<Real>(cm, ConstMap<Real>(a, M, K, sa), ConstMap<Real>(b, N, K, sb).transpose(), accumulate);
  } else if (trans_a && !trans_b) {
    assign<Real>(cm, ConstMap<Real>(a, K, M, sa).transpose(), ConstMap<Real>(b, K, N, sb), accumulate);
  } else {
    assign<Real>(cm, ConstMap<Real>(a, K, M, sa).transpose(), ConstMap<Real>(b, N, K, sb).transpose(),
                 accumulate);
  }
}

template <typename Real>
void gemm(bool trans_a, bool trans_b, std::size_t m, std::size_t n, std::size_t k, const Real* a,
          const Real* b, Real* c, bool accumulate) {
  gemm_strided(trans_a, trans_b, m, n, k, a, trans_a ? m : k, b, trans_b ? k : n, c, n, accumulate);
}

#define SLOTLAB_INSTANTIATE_GEMM(Real)                                                                     \
  template void gemm<Real>(bool, bool, std::size_t, std::size_t, std::size_t, const Real*, const Real*,   \
                           Real*, bool);                                                                   \
  template void gemm_strided<Real>(bool, bool, std::size_t, std::size_t, std::size_t, const Real*,        \
                                   std::size_t, const Real*, std::size_t, Real*, std::size_t, bool);

SLOTLAB_INSTANTIATE_GEMM(float)
SLOTLAB_INSTANTIATE_GEMM(double)

}  // namespace slotlab
