// Copyright 2026 The minlab Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//    http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Numeric grid checks of the standard concentration and approximation
// inequalities against exact binomial quantities.

#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace minlab {

// One inequality evaluated at one parameter point, in natural-log scale.
struct BoundEvaluation {
  double log_exact = 0.0;
  double log_bound = 0.0;
  bool holds = false;
};

// X ~ Bin(n, p), mu = n p. Each function throws InvalidArgument outside its
// hypotheses.

// P(X > mu + t) <= exp(-2 t^2 / n), t > 0.
BoundEvaluation additive_chernoff_upper(std::int64_t n, double p, double t);
// P(X < mu - t) <= exp(-2 t^2 / n), t > 0.
BoundEvaluation additive_chernoff_lower(std::int64_t n, double p, double t);
// P(X > (1 + eps) mu) <= exp(-eps^2 mu / 2), eps in (0, 1].
BoundEvaluation multiplicative_chernoff_upper(std::int64_t n, double p,
                                              double eps);
// P(X < (1 - eps) mu) <= exp(-eps^2 mu / 2), eps in (0, 1).
BoundEvaluation multiplicative_chernoff_lower(std::int64_t n, double p,
                                              double eps);
// P(X >= mu + t) >= exp(-2 t^2 / mu) / 4 for p <= 1/4, mu >= 3, t >= 0.
BoundEvaluation reverse_chernoff_quarter(std::int64_t n, double p, double t);
// P(X > mu + t) >= exp(-2 t^2 / mu) / 4 for p <= 1/2, mu >= 3,
// 0 <= t <= n (1 - 2p).
BoundEvaluation reverse_chernoff_half(std::int64_t n, double p, double t);
// P(X >= (1 + d) mu) >= exp(-9 d^2 mu) for d in (0, 1/2], d^2 mu >= 3.
BoundEvaluation reverse_chernoff_upper_tail(std::int64_t n, double p,
                                            double delta);
// P(X <= (1 - d) mu) >= exp(-9 d^2 mu), same hypotheses.
BoundEvaluation reverse_chernoff_lower_tail(std::int64_t n, double p,
                                            double delta);

// ln of exp(-2ky), exp(-ky - ky^2), (1 - y)^k and exp(-ky) for y = x/n.
struct ExpTaylorEvaluation {
  double log_terms[4] = {0.0, 0.0, 0.0, 0.0};
  bool holds = false;
};
// Requires 0 <= y <= 0.6 and k >= 1.
ExpTaylorEvaluation exp_taylor(double y, std::int64_t k);

// 4^n / (2 sqrt(pi n)) <= C(2n, n) <= 4^n / sqrt(pi n).
struct CentralBinomialEvaluation {
  std::int64_t n = 0;
  // Exact integer value while it fits in 64 bits (n <= 33).
  std::optional<std::uint64_t> exact;
  double log_coefficient = 0.0;
  double log_lower = 0.0;
  double log_upper = 0.0;
  bool holds = false;
};
CentralBinomialEvaluation central_binomial(std::int64_t n);

struct BoundSuiteResult {
  std::string name;
  std::size_t points = 0;
  std::size_t violations = 0;
  // Smallest slack (log scale) over the grid; negative on a violation.
  double worst_log_margin = 0.0;
  bool verdict() const noexcept { return points > 0 && violations == 0; }
};

// Every inequality over its fixed grid: 200 points per Chernoff-type form,
// n in [10, 200] for the central binomial, 100 points for exp_taylor.
std::vector<BoundSuiteResult> run_bound_suites();

}  // namespace minlab
