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

#ifndef SELQA_KERNELS_KERNELS_HPP_
#define SELQA_KERNELS_KERNELS_HPP_

#include <cstddef>
#include <string_view>

// Dense double-precision inner loops. Every kernel has a scalar reference
// implementation and, on x86-64, an AVX2+FMA variant. The active table is
// chosen once at startup from CPUID; SELQA_SIMD=scalar forces the reference.
//
// All matrix kernels compute each output row independently and in a fixed
// order, so splitting a batch by rows never changes the bits of a result.

namespace selqa::kernels {

enum class Isa { kScalar, kAvx2 };

std::string_view IsaName(Isa isa);

struct KernelTable {
  Isa isa;
  // sum_i a[i] * b[i]
  double (*dot)(const double* a, const double* b, std::size_t n);
  // y[i] += alpha * x[i]
  void (*axpy)(double alpha, const double* x, double* y, std::size_t n);
  // y[i] = max(x[i], 0)
  void (*relu)(const double* x, double* y, std::size_t n);
  // gx[i] += x[i] > 0 ? gy[i] : 0
  void (*relu_backward)(const double* x, const double* gy, double* gx,
                        std::size_t n);
  // out[i] = a[i] * b[i]
  void (*mul)(const double* a, const double* b, double* out, std::size_t n);
  // y[i] += x[i]
  void (*add)(const double* x, double* y, std::size_t n);
};

const KernelTable& ScalarTable();

// Returns nullptr when the build has no AVX2 variant or the CPU lacks it.
const KernelTable* Avx2Table();

// The dispatched table.
const KernelTable& Active();

// Overrides dispatch (tests and benchmarks). Returns false when the
// requested ISA is unavailable on this machine.
bool ForceIsa(Isa isa);

// c(n x m) = a(n x k) * b(k x m), or += when accumulate is set.
void Gemm(const KernelTable& t, const double* a, const double* b, double* c,
          std::size_t n, std::size_t k, std::size_t m, bool accumulate);

// c(k x m) += a(n x k)^T * g(n x m)
void GemmAtB(const KernelTable& t, const double* a, const double* g,
             double* c, std::size_t n, std::size_t k, std::size_t m);

// c(n x k) += g(n x m) * b(k x m)^T
void GemmABt(const KernelTable& t, const double* g, const double* b,
             double* c, std::size_t n, std::size_t k, std::size_t m);

inline void Gemm(const double* a, const double* b, double* c, std::size_t n,
                 std::size_t k, std::size_t m, bool accumulate) {
  Gemm(Active(), a, b, c, n, k, m, accumulate);
}
inline void GemmAtB(const double* a, const double* g, double* c,
                    std::size_t n, std::size_t k, std::size_t m) {
  GemmAtB(Active(), a, g, c, n, k, m);
}
inline void GemmABt(const double* g, const double* b, double* c,
                    std::size_t n, std::size_t k, std::size_t m) {
  GemmABt(Active(), g, b, c, n, k, m);
}

}  // namespace selqa::kernels

#endif  // SELQA_KERNELS_KERNELS_HPP_
