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

#include <gtest/gtest.h>

#include <cmath>
#include <vector>

#include "selqa/kernels/kernels.hpp"
#include "selqa/nn/rng.hpp"

namespace selqa::kernels {
namespace {

std::vector<double> Random(std::size_t n, std::uint64_t seed) {
  nn::RngStream r(seed, 0);
  std::vector<double> v(n);
  for (double& x : v) x = r.Normal();
  return v;
}

// Lengths straddling the 4-wide vector body and its tail.
const std::size_t kLengths[] = {0, 1, 3, 4, 5, 7, 8, 9, 16, 31, 64, 129};

double Tol(double ref) { return 1e-12 * std::max(1.0, std::abs(ref)); }

class KernelEquivalence : public ::testing::Test {
 protected:
  void SetUp() override {
    avx2_ = Avx2Table();
    if (avx2_ == nullptr) GTEST_SKIP() << "no AVX2 variant on this machine";
  }
  const KernelTable& scalar_ = ScalarTable();
  const KernelTable* avx2_ = nullptr;
};

TEST_F(KernelEquivalence, Dot) {
  for (std::size_t n : kLengths) {
    auto a = Random(n, 1), b = Random(n, 2);
    const double ref = scalar_.dot(a.data(), b.data(), n);
    EXPECT_NEAR(avx2_->dot(a.data(), b.data(), n), ref, Tol(ref)) << n;
  }
}

TEST_F(KernelEquivalence, Axpy) {
  for (std::size_t n : kLengths) {
    auto x = Random(n, 3), y1 = Random(n, 4);
    auto y2 = y1;
    scalar_.axpy(0.37, x.data(), y1.data(), n);
    avx2_->axpy(0.37, x.data(), y2.data(), n);
    for (std::size_t i = 0; i < n; ++i) EXPECT_NEAR(y2[i], y1[i], Tol(y1[i]));
  }
}

TEST_F(KernelEquivalence, ElementwiseAreExact) {
  for (std::size_t n : kLengths) {
    auto a = Random(n, 5), b = Random(n, 6), g = Random(n, 7);
    std::vector<double> o1(n), o2(n);
    scalar_.relu(a.data(), o1.data(), n);
    avx2_->relu(a.data(), o2.data(), n);
    EXPECT_EQ(o1, o2);
    scalar_.mul(a.data(), b.data(), o1.data(), n);
    avx2_->mul(a.data(), b.data(), o2.data(), n);
    EXPECT_EQ(o1, o2);
    auto s1 = b, s2 = b;
    scalar_.add(a.data(), s1.data(), n);
    avx2_->add(a.data(), s2.data(), n);
    EXPECT_EQ(s1, s2);
    auto gx1 = b, gx2 = b;
    scalar_.relu_backward(a.data(), g.data(), gx1.data(), n);
    avx2_->relu_backward(a.data(), g.data(), gx2.data(), n);
    EXPECT_EQ(gx1, gx2);
  }
}

TEST_F(KernelEquivalence, GemmFamilies) {
  for (std::size_t n : {1u, 3u, 8u}) {
    for (std::size_t k : {1u, 5u, 17u}) {
      for (std::size_t m : {1u, 4u, 9u}) {
        auto a = Random(n * k, 10), b = Random(k * m, 11), g = Random(n * m, 12);
        std::vector<double> c1(n * m), c2(n * m);
        Gemm(scalar_, a.data(), b.data(), c1.data(), n, k, m, false);
        Gemm(*avx2_, a.data(), b.data(), c2.data(), n, k, m, false);
        for (std::size_t i = 0; i < c1.size(); ++i) EXPECT_NEAR(c2[i], c1[i], Tol(c1[i]));
        std::vector<double> d1(k * m), d2(k * m);
        GemmAtB(scalar_, a.data(), g.data(), d1.data(), n, k, m);
        GemmAtB(*avx2_, a.data(), g.data(), d2.data(), n, k, m);
        for (std::size_t i = 0; i < d1.size(); ++i) EXPECT_NEAR(d2[i], d1[i], Tol(d1[i]));
        std::vector<double> e1(n * k), e2(n * k);
        GemmABt(scalar_, g.data(), b.data(), e1.data(), n, k, m);
        GemmABt(*avx2_, g.data(), b.data(), e2.data(), n, k, m);
        for (std::size_t i = 0; i < e1.size(); ++i) EXPECT_NEAR(e2[i], e1[i], Tol(e1[i]));
      }
    }
  }
}

TEST(KernelTest, ScalarGemmMatchesNaiveLoop) {
  const std::size_t n = 3, k = 4, m = 2;
  auto a = Random(n * k, 20), b = Random(k * m, 21);
  std::vector<double> c(n * m);
  Gemm(ScalarTable(), a.data(), b.data(), c.data(), n, k, m, false);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < m; ++j) {
      double ref = 0.0;
      for (std::size_t p = 0; p < k; ++p) ref += a[i * k + p] * b[p * m + j];
      EXPECT_NEAR(c[i * m + j], ref, 1e-14);
    }
  }
}

TEST(KernelTest, GemmMatchesNaiveLoopAcrossWidths) {
  // Widths on both sides of the narrow-product cutoff, with accumulation and
  // exact zeros in a (as after a ReLU).
  for (const KernelTable* t : {&ScalarTable(), Avx2Table()}) {
    if (t == nullptr) continue;
    for (std::size_t m : {1u, 2u, 7u, 8u, 9u, 16u, 33u}) {
      const std::size_t n = 5, k = 19;
      auto a = Random(n * k, 40), b = Random(k * m, 41), c0 = Random(n * m, 42);
      for (std::size_t i = 0; i < a.size(); i += 3) a[i] = 0.0;
      for (bool accumulate : {false, true}) {
        std::vector<double> c = c0;
        Gemm(*t, a.data(), b.data(), c.data(), n, k, m, accumulate);
        for (std::size_t i = 0; i < n; ++i) {
          for (std::size_t j = 0; j < m; ++j) {
            long double ref = accumulate ? c0[i * m + j] : 0.0;
            for (std::size_t p = 0; p < k; ++p) {
              ref += static_cast<long double>(a[i * k + p]) * b[p * m + j];
            }
            EXPECT_NEAR(c[i * m + j], static_cast<double>(ref), 1e-12)
                << "m " << m << " accumulate " << accumulate;
          }
        }
      }
    }
  }
}

TEST(KernelTest, RowsAreIndependentOfBatch) {
  // A row computed inside a batch equals the same row computed alone.
  const std::size_t n = 6, k = 13, m = 5;
  auto a = Random(n * k, 30), b = Random(k * m, 31);
  std::vector<double> full(n * m), single(m);
  Gemm(Active(), a.data(), b.data(), full.data(), n, k, m, false);
  for (std::size_t r = 0; r < n; ++r) {
    Gemm(Active(), a.data() + r * k, b.data(), single.data(), 1, k, m, false);
    for (std::size_t j = 0; j < m; ++j) EXPECT_EQ(single[j], full[r * m + j]);
  }
}

TEST(KernelTest, ForceIsaSwitchesDispatch) {
  const Isa original = Active().isa;
  ASSERT_TRUE(ForceIsa(Isa::kScalar));
  EXPECT_EQ(Active().isa, Isa::kScalar);
  if (Avx2Table() != nullptr) {
    EXPECT_TRUE(ForceIsa(Isa::kAvx2));
    EXPECT_EQ(Active().isa, Isa::kAvx2);
  } else {
    EXPECT_FALSE(ForceIsa(Isa::kAvx2));
  }
  ForceIsa(original);
  EXPECT_EQ(IsaName(Isa::kScalar), "scalar");
}

}  // namespace
}  // namespace selqa::kernels
