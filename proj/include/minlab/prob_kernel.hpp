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

// Exact, log-space probability kernels for one node's k-sample and the
// expectation-level quantities built on them.

#pragma once

#include <cstdint>
#include <limits>

#include "minlab/core_model.hpp"

namespace minlab {

inline constexpr double kNegInf = -std::numeric_limits<double>::infinity();
inline constexpr double kInf = std::numeric_limits<double>::infinity();

// Probabilities whose natural log is below this are reported as exactly 0.
inline constexpr double kLogUnderflow = -700.0;

struct KernelParams {
  UpdateRule rule;
  std::int64_t n = 0;
  SamplingMode mode = SamplingMode::with_replacement;

  std::int64_t k() const noexcept { return rule.k; }
  // Throws on k < 1, n < 2, or exclusive sampling with k > n - 1.
  void validate() const;
};

double log_add_exp(double a, double b) noexcept;

// Saddle-point (Loader) evaluation of ln P(Bin(k, p) = j).
double log_binomial_pmf(std::int64_t k, double p, std::int64_t j);
// ln P(lo <= Bin(k, p) <= hi), summed outward from the largest term.
double log_binomial_range(std::int64_t k, double p, std::int64_t lo,
                          std::int64_t hi);
// ln P(Bin(k, p) >= j), accumulated from the smaller tail. Exactly -inf for
// empty events.
double log_binomial_tail_geq(std::int64_t k, double p, std::int64_t j);

// Draw `draws` items without replacement from `population` items of which
// `successes` are marked; ln P(exactly j marked).
double log_hypergeometric_pmf(std::int64_t population, std::int64_t successes,
                              std::int64_t draws, std::int64_t j);
double log_hypergeometric_range(std::int64_t population,
                                std::int64_t successes, std::int64_t draws,
                                std::int64_t lo, std::int64_t hi);

// Law of the number of opinion-1 nodes among one node's k samples, given X
// ones in the population and the sampling node's own opinion (only matters
// for exclusive sampling).
class SampleCountLaw {
 public:
  SampleCountLaw(const KernelParams& params, std::int64_t ones, Opinion self);

  std::int64_t draws() const noexcept { return draws_; }
  double log_pmf(std::int64_t j) const;
  double log_range(std::int64_t lo, std::int64_t hi) const;

 private:
  bool binomial_;
  std::int64_t draws_;
  double p_ = 0.0;
  std::int64_t population_ = 0;
  std::int64_t successes_ = 0;
};

// exp(log_p), flushed to 0 (and `underflow` raised) below e^-700.
double to_probability(double log_p, bool& underflow) noexcept;

// Probability that a node holding `self` adopts opinion 1 after sampling a
// population with `ones` ones.
double adopt_one_probability(const KernelParams& params, std::int64_t ones,
                             Opinion self = Opinion::zero);

struct NodeEventProbs {
  // Sample holds more than k/2 minority opinions (ties count half for even
  // k). Includes the all-minority sample.
  double wrong_minority_sample = 0.0;
  // All k samples hold the majority opinion.
  double unanimity_majority = 0.0;
  // All k samples hold the minority opinion (subset of the first event).
  double unanimity_minority = 0.0;
  double adopt_one = 0.0;
  bool underflow = false;
};

// Events for a node holding the majority opinion when the minority has size
// m and label `minority`.
NodeEventProbs node_event_probs(const KernelParams& params, std::int64_t m,
                                Opinion minority);

// E[U | m] = n (1 - m/n)^k for with-replacement sampling.
double expected_u(const KernelParams& params, std::int64_t m);
// Same closed form for real m (with-replacement only).
double expected_u_real(std::int64_t n, std::int64_t k, double m);
// E[W | m] = n * P(more than k/2 minority samples).
double expected_w(const KernelParams& params, std::int64_t m);

// Piecewise approximation of E[m_{t+1} | m_t = m].
double f_map(const KernelParams& params, std::int64_t m,
             const AreaPartition& part);

struct YellowFixedPoint {
  double value = 0.0;
  std::int64_t below = 0;
  std::int64_t above = 0;
  // n (1 - value/n)^k - value
  double residual = 0.0;
};

// Root of n (1 - m/n)^k = m inside Yellow by bisection (absolute tolerance
// 1e-6). Throws NoFixedPoint without a sign change on [b3, b4].
YellowFixedPoint fixed_point_yellow(const KernelParams& params,
                                    const AreaPartition& part);

}  // namespace minlab
