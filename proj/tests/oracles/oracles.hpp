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

#ifndef SELQA_TESTS_ORACLES_HPP_
#define SELQA_TESTS_ORACLES_HPP_

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <utility>
#include <vector>

// Reference implementations written independently of the library: plain
// loops, long double where precision matters, brute force where the library
// is clever. Tests compare library output against these.
namespace selqa::oracle {

// One dense layer: w is in x out, row-major.
struct DenseLayer {
  std::size_t in = 0;
  std::size_t out = 0;
  std::vector<double> w;
  std::vector<double> b;
  bool relu = false;
};

// Row vector through a stack of dense layers, accumulated in long double.
std::vector<double> DenseForward(const std::vector<DenseLayer>& layers,
                                 std::vector<double> x);

// exp(z_i) / sum exp(z_j) evaluated in long double without shifting.
std::vector<long double> SoftmaxLd(const std::vector<double>& z);

// (f(x + h) - f(x - h)) / 2h for coordinate i of x.
double CentralDifference(const std::function<double(std::vector<double>&)>& f,
                         std::vector<double>& x, std::size_t i, double h);

// |a - n| / max(|a|, |n|, floor).
double RelativeError(double analytic, double numeric, double floor = 1e-8);

// Population mean and variance by two passes.
std::pair<double, double> MeanVariance(const std::vector<double>& v);

// Strict-inequality selection count that a nearest-rank threshold fitted at
// percentile p should produce: tries every candidate threshold (each score
// and +inf) and keeps the count nearest (100 - p)% of n, smaller on ties.
std::size_t NearestRankCount(const std::vector<double>& scores, double p);

// Mean prefix risk after sorting by (score, id).
double AurcBruteForce(const std::vector<double>& scores,
                      const std::vector<bool>& correct,
                      const std::vector<std::uint64_t>& ids);

// AURC when every correct prediction is ranked before every error:
// (1/n) * sum_{k=c+1..n} (k - c) / k.
double AurcSeparable(std::size_t n_correct, std::size_t n);

// Fraction of (positive, negative) pairs ordered correctly; ties count 1/2.
double AurocPairs(const std::vector<double>& scores,
                  const std::vector<bool>& positive);

// Multiset F1 by sorting and merging.
double MultisetF1(std::vector<std::size_t> pred, std::vector<std::size_t> gold);

// Span count by double loop.
std::size_t SpanCount(std::size_t context_len, std::size_t max_span_len);

// Shannon entropy in nats.
double Entropy(const std::vector<double>& p);

// Two-sample Welch t statistic of mean(a) - mean(b).
double WelchT(const std::vector<double>& a, const std::vector<double>& b);

}  // namespace selqa::oracle

#endif  // SELQA_TESTS_ORACLES_HPP_
