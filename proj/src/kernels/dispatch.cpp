/*
 * Copyright 2026 The selqa Authors.
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include <atomic>
#include <cstdlib>
#include <cstring>
#include <vector>

#include "selqa/kernels/kernels.hpp"

namespace selqa::kernels {

#if defined(SELQA_HAVE_AVX2)
const KernelTable& Avx2TableUnchecked();
#endif

namespace {

bool CpuHasAvx2() {
#if defined(SELQA_HAVE_AVX2) && (defined(__GNUC__) || defined(__clang__))
  __builtin_cpu_init();
  return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
  return false;
#endif
}

const KernelTable* SelectDefault() {
  const char* env = std::getenv("SELQA_SIMD");
  if (env != nullptr && std::strcmp(env, "scalar") == 0) return &ScalarTable();
  if (const KernelTable* avx = Avx2Table()) return avx;
  return &ScalarTable();
}

std::atomic<const KernelTable*>& Slot() {
  static std::atomic<const KernelTable*> slot{SelectDefault()};
  return slot;
}

}  // namespace

std::string_view IsaName(Isa isa) {
  switch (isa) {
    case Isa::kScalar:
      return "scalar";
    case Isa::kAvx2:
      return "avx2";
  }
  return "unknown";
}

const KernelTable* Avx2Table() {
#if defined(SELQA_HAVE_AVX2)
  static const bool supported = CpuHasAvx2();
  return supported ? &Avx2TableUnchecked() : nullptr;
#else
  return nullptr;
#endif
}

const KernelTable& Active() { return *Slot().load(std::memory_order_relaxed); }

bool ForceIsa(Isa isa) {
  const KernelTable* table =
      isa == Isa::kScalar ? &ScalarTable() : Avx2Table();
  if (table == nullptr) return false;
  Slot().store(table, std::memory_order_relaxed);
  return true;
}

// Below this output width a row-wise axpy is dominated by call overhead;
// such products transpose b once and take one contiguous dot per output.
constexpr std::size_t kNarrowWidth = 8;

void Gemm(const KernelTable& t, const double* a, const double* b, double* c,
          std::size_t n, std::size_t k, std::size_t m, bool accumulate) {
  if (m <= kNarrowWidth) {
    std::vector<double> bt(k * m);
    for (std::size_t p = 0; p < k; ++p) {
      for (std::size_t j = 0; j < m; ++j) bt[j * k + p] = b[p * m + j];
    }
    for (std::size_t i = 0; i < n; ++i) {
      const double* ai = a + i * k;
      double* ci = c + i * m;
      for (std::size_t j = 0; j < m; ++j) {
        const double d = t.dot(ai, bt.data() + j * k, k);
        ci[j] = accumulate ? ci[j] + d : d;
      }
    }
    return;
  }
  for (std::size_t i = 0; i < n; ++i) {
    double* ci = c + i * m;
    if (!accumulate) std::memset(ci, 0, m * sizeof(double));
    const double* ai = a + i * k;
    // No zero skip: inference cost must not depend on activation sparsity.
    for (std::size_t p = 0; p < k; ++p) t.axpy(ai[p], b + p * m, ci, m);
  }
}

void GemmAtB(const KernelTable& t, const double* a, const double* g,
             double* c, std::size_t n, std::size_t k, std::size_t m) {
  for (std::size_t i = 0; i < n; ++i) {
    const double* ai = a + i * k;
    const double* gi = g + i * m;
    for (std::size_t p = 0; p < k; ++p) {
      const double aip = ai[p];
      if (aip == 0.0) continue;
      t.axpy(aip, gi, c + p * m, m);
    }
  }
}

void GemmABt(const KernelTable& t, const double* g, const double* b,
             double* c, std::size_t n, std::size_t k, std::size_t m) {
  for (std::size_t i = 0; i < n; ++i) {
    const double* gi = g + i * m;
    double* ci = c + i * k;
    for (std::size_t p = 0; p < k; ++p) ci[p] += t.dot(gi, b + p * m, m);
  }
}

}  // namespace selqa::kernels
