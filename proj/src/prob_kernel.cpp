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

#include "minlab/prob_kernel.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "minlab/error.hpp"

namespace minlab {
namespace {

constexpr double kLn2Pi = 1.8378770664093454836;  // ln(2 pi)

// ln(x!) - ln(sqrt(2 pi x) (x/e)^x)
double stirlerr(double x) {
  if (x <= 15.0) {
    return std::lgamma(x + 1.0) - (x + 0.5) * std::log(x) + x - 0.5 * kLn2Pi;
  }
  constexpr double s0 = 1.0 / 12.0;
  constexpr double s1 = 1.0 / 360.0;
  constexpr double s2 = 1.0 / 1260.0;
  constexpr double s3 = 1.0 / 1680.0;
  constexpr double s4 = 1.0 / 1188.0;
  const double xx = x * x;
  if (x > 500.0) return (s0 - s1 / xx) / x;
  if (x > 80.0) return (s0 - (s1 - s2 / xx) / xx) / x;
  if (x > 35.0) return (s0 - (s1 - (s2 - s3 / xx) / xx) / xx) / x;
  return (s0 - (s1 - (s2 - (s3 - s4 / xx) / xx) / xx) / xx) / x;
}

// x ln(x / np) + np - x without cancellation near x = np.
double bd0(double x, double np) {
  if (std::fabs(x - np) < 0.1 * (x + np)) {
    const double v = (x - np) / (x + np);
    double s = (x - np) * v;
    double ej = 2.0 * x * v;
    const double v2 = v * v;
    for (int j = 1; j < 1000; ++j) {
      ej *= v2;
      const double s1 = s + ej / (2 * j + 1);
      if (s1 == s) return s1;
      s = s1;
    }
    return s;
  }
  return x * std::log(x / np) + np - x;
}

// ln P(Bin(n, p) = x) with q = 1 - p supplied separately.
double log_dbinom_raw(double x, double n, double p, double q) {
  if (p == 0.0) return x == 0.0 ? 0.0 : kNegInf;
  if (q == 0.0) return x == n ? 0.0 : kNegInf;
  if (x == 0.0) {
    if (n == 0.0) return 0.0;
    return p < 0.1 ? -bd0(n, n * q) - n * p : n * std::log(q);
  }
  if (x == n) {
    return q < 0.1 ? -bd0(n, n * p) - n * q : n * std::log(p);
  }
  if (x < 0.0 || x > n) return kNegInf;
  const double lc = stirlerr(n) - stirlerr(x) - stirlerr(n - x) -
                    bd0(x, n * p) - bd0(n - x, n * q);
  const double lf = kLn2Pi + std::log(x) + std::log1p(-x / n);
  return lc - 0.5 * lf;
}

// A log-concave integer law described by its support, a mode, its log pmf
// and the successive ratio pmf(j+1)/pmf(j).
template <class Law>
double log_range_sum(const Law& law, std::int64_t lo, std::int64_t hi) {
  lo = std::max(lo, law.support_lo());
  hi = std::min(hi, law.support_hi());
  if (lo > hi) return kNegInf;
  const std::int64_t peak = std::clamp(law.mode(), lo, hi);
  const double log_peak = law.log_pmf(peak);
  if (log_peak == kNegInf) return kNegInf;
  constexpr double kRelTol = 1e-17;
  double sum = 1.0;
  double term = 1.0;
  for (std::int64_t j = peak; j < hi; ++j) {
    const double r = law.ratio(j);
    term *= r;
    sum += term;
    if (term == 0.0) break;
    if (r < 1.0 && term * r / (1.0 - r) < kRelTol * sum) break;
  }
  term = 1.0;
  for (std::int64_t j = peak; j > lo; --j) {
    const double r = 1.0 / law.ratio(j - 1);
    term *= r;
    sum += term;
    if (term == 0.0) break;
    if (r < 1.0 && term * r / (1.0 - r) < kRelTol * sum) break;
  }
  return log_peak + std::log(sum);
}

struct BinomialLaw {
  std::int64_t k;
  double p;
  double q;
  double odds;

  BinomialLaw(std::int64_t k_, double p_)
      : k(k_), p(p_), q(1.0 - p_), odds(p_ / (1.0 - p_)) {}

  std::int64_t support_lo() const { return p == 1.0 ? k : 0; }
  std::int64_t support_hi() const { return p == 0.0 ? 0 : k; }
  std::int64_t mode() const {
    const auto m = static_cast<std::int64_t>(std::floor((k + 1) * p));
    return std::clamp<std::int64_t>(m, 0, k);
  }
  double log_pmf(std::int64_t j) const {
    return log_dbinom_raw(static_cast<double>(j), static_cast<double>(k), p, q);
  }
  double ratio(std::int64_t j) const {
    return static_cast<double>(k - j) / static_cast<double>(j + 1) * odds;
  }
};

struct HypergeometricLaw {
  std::int64_t pop;
  std::int64_t succ;
  std::int64_t draws;

  std::int64_t support_lo() const {
    return std::max<std::int64_t>(0, draws - (pop - succ));
  }
  std::int64_t support_hi() const { return std::min(draws, succ); }
  std::int64_t mode() const {
    const double m = std::floor(static_cast<double>(draws + 1) *
                                static_cast<double>(succ + 1) /
                                static_cast<double>(pop + 2));
    return std::clamp(static_cast<std::int64_t>(m), support_lo(),
                      support_hi());
  }
  double log_pmf(std::int64_t j) const {
    if (j < support_lo() || j > support_hi()) return kNegInf;
    if (draws == 0 || draws == pop) return 0.0;
    const double nn = static_cast<double>(pop);
    const double p = static_cast<double>(draws) / nn;
    const double q = static_cast<double>(pop - draws) / nn;
    const double l1 = log_dbinom_raw(static_cast<double>(j),
                                     static_cast<double>(succ), p, q);
    const double l2 = log_dbinom_raw(static_cast<double>(draws - j),
                                     static_cast<double>(pop - succ), p, q);
    const double l3 = log_dbinom_raw(static_cast<double>(draws), nn, p, q);
    return l1 + l2 - l3;
  }
  double ratio(std::int64_t j) const {
    const double num = static_cast<double>(succ - j) *
                       static_cast<double>(draws - j);
    const double den = static_cast<double>(j + 1) *
                       static_cast<double>(pop - succ - draws + j + 1);
    return num / den;
  }
};

void check_binomial_args(std::int64_t k, double p) {
  require(k >= 0, "binomial: k must be non-negative");
  require(p >= 0.0 && p <= 1.0, "binomial: p must lie in [0, 1]");
}

void check_hyper_args(std::int64_t pop, std::int64_t succ,
                      std::int64_t draws) {
  require(pop >= 0 && succ >= 0 && succ <= pop && draws >= 0 && draws <= pop,
          "hypergeometric: invalid population, successes or draws");
}

}  // namespace

void KernelParams::validate() const {
  require(rule.k >= 1, "k must be at least 1");
  require(n >= 2, "n must be at least 2");
  if (rule.kind == RuleKind::voter) {
    require(rule.k == 1, "the voter rule samples exactly one node");
  }
  if (mode == SamplingMode::exclusive) {
    require(rule.k <= n - 1, "exclusive sampling needs k <= n - 1");
  }
}

double log_add_exp(double a, double b) noexcept {
  if (a == kNegInf) return b;
  if (b == kNegInf) return a;
  const double hi = std::max(a, b);
  return hi + std::log1p(std::exp(std::min(a, b) - hi));
}

double log_binomial_pmf(std::int64_t k, double p, std::int64_t j) {
  check_binomial_args(k, p);
  if (j < 0 || j > k) return kNegInf;
  return BinomialLaw(k, p).log_pmf(j);
}

double log_binomial_range(std::int64_t k, double p, std::int64_t lo,
                          std::int64_t hi) {
  check_binomial_args(k, p);
  return log_range_sum(BinomialLaw(k, p), lo, hi);
}

double log_binomial_tail_geq(std::int64_t k, double p, std::int64_t j) {
  check_binomial_args(k, p);
  if (j <= 0) return 0.0;
  if (j > k) return kNegInf;
  const BinomialLaw law(k, p);
  if (j > law.mode()) return log_range_sum(law, j, k);
  const double lower = log_range_sum(law, 0, j - 1);
  if (lower == kNegInf) return 0.0;
  return std::log1p(-std::exp(lower));
}

double log_hypergeometric_pmf(std::int64_t population, std::int64_t successes,
                              std::int64_t draws, std::int64_t j) {
  check_hyper_args(population, successes, draws);
  return HypergeometricLaw{population, successes, draws}.log_pmf(j);
}

double log_hypergeometric_range(std::int64_t population,
                                std::int64_t successes, std::int64_t draws,
                                std::int64_t lo, std::int64_t hi) {
  check_hyper_args(population, successes, draws);
  return log_range_sum(HypergeometricLaw{population, successes, draws}, lo,
                       hi);
}

SampleCountLaw::SampleCountLaw(const KernelParams& params, std::int64_t ones,
                               Opinion self)
    : binomial_(params.mode == SamplingMode::with_replacement),
      draws_(params.k()) {
  params.validate();
  require(ones >= 0 && ones <= params.n, "ones must lie in [0, n]");
  if (binomial_) {
    p_ = static_cast<double>(ones) / static_cast<double>(params.n);
  } else {
    require(self == Opinion::zero ? ones <= params.n - 1 : ones >= 1,
            "self opinion inconsistent with the population");
    population_ = params.n - 1;
    successes_ = self == Opinion::one ? ones - 1 : ones;
  }
}

double SampleCountLaw::log_pmf(std::int64_t j) const {
  if (binomial_) {
    if (j < 0 || j > draws_) return kNegInf;
    return BinomialLaw(draws_, p_).log_pmf(j);
  }
  return HypergeometricLaw{population_, successes_, draws_}.log_pmf(j);
}

double SampleCountLaw::log_range(std::int64_t lo, std::int64_t hi) const {
  if (binomial_) return log_range_sum(BinomialLaw(draws_, p_), lo, hi);
  return log_range_sum(HypergeometricLaw{population_, successes_, draws_}, lo,
                       hi);
}

double to_probability(double log_p, bool& underflow) noexcept {
  if (log_p == kNegInf) return 0.0;
  if (log_p < kLogUnderflow) {
    underflow = true;
    return 0.0;
  }
  return std::min(1.0, std::exp(log_p));
}

namespace {

// Probability of adopting 1 given the law of B1 (ones among the samples).
double adopt_from_law(RuleKind kind, std::int64_t k, const SampleCountLaw& law,
                      bool& underflow) {
  const bool even = k % 2 == 0;
  double tie = 0.0;
  if (even) tie = 0.5 * to_probability(law.log_pmf(k / 2), underflow);
  switch (kind) {
    case RuleKind::voter:
      return to_probability(law.log_pmf(1), underflow);
    case RuleKind::majority:
      return to_probability(law.log_range(k / 2 + 1, k), underflow) + tie;
    case RuleKind::minority: {
      const std::int64_t upper = (k + 1) / 2 - 1;
      double p = to_probability(law.log_pmf(k), underflow);
      if (upper >= 1) p += to_probability(law.log_range(1, upper), underflow);
      return std::min(1.0, p + tie);
    }
  }
  return 0.0;
}

}  // namespace

double adopt_one_probability(const KernelParams& params, std::int64_t ones,
                             Opinion self) {
  const SampleCountLaw law(params, ones, self);
  bool underflow = false;
  return adopt_from_law(params.rule.kind, params.k(), law, underflow);
}

NodeEventProbs node_event_probs(const KernelParams& params, std::int64_t m,
                                Opinion minority) {
  params.validate();
  require(m >= 0 && 2 * m <= params.n, "m must lie in [0, n/2]");
  const std::int64_t k = params.k();
  const std::int64_t ones = minority == Opinion::one ? m : params.n - m;
  const Opinion self = opposite(minority);
  // A majority-holding node must exist for exclusive sampling.
  const SampleCountLaw law(params, ones, self);

  NodeEventProbs out;
  bool& uf = out.underflow;
  const bool even = k % 2 == 0;
  const double tie = even ? 0.5 * to_probability(law.log_pmf(k / 2), uf) : 0.0;
  // B1 values with more than k/2 minority samples.
  const double strict =
      minority == Opinion::one
          ? to_probability(law.log_range(k / 2 + 1, k), uf)
          : to_probability(law.log_range(0, (k + 1) / 2 - 1), uf);
  out.wrong_minority_sample = std::min(1.0, strict + tie);
  const std::int64_t all_minority = minority == Opinion::one ? k : 0;
  out.unanimity_majority = to_probability(law.log_pmf(k - all_minority), uf);
  out.unanimity_minority = to_probability(law.log_pmf(all_minority), uf);
  out.adopt_one = adopt_from_law(params.rule.kind, k, law, uf);
  return out;
}

double expected_u_real(std::int64_t n, std::int64_t k, double m) {
  require(n >= 1 && k >= 1, "expected_u: n and k must be positive");
  require(m >= 0.0 && m <= static_cast<double>(n),
          "expected_u: m must lie in [0, n]");
  const double nn = static_cast<double>(n);
  if (m == nn) return 0.0;
  return nn * std::exp(static_cast<double>(k) * std::log1p(-m / nn));
}

double expected_u(const KernelParams& params, std::int64_t m) {
  if (params.mode == SamplingMode::with_replacement) {
    params.validate();
    require(m >= 0 && 2 * m <= params.n, "m must lie in [0, n/2]");
    return expected_u_real(params.n, params.k(), static_cast<double>(m));
  }
  return static_cast<double>(params.n) *
         node_event_probs(params, m, Opinion::one).unanimity_majority;
}

double expected_w(const KernelParams& params, std::int64_t m) {
  return static_cast<double>(params.n) *
         node_event_probs(params, m, Opinion::one).wrong_minority_sample;
}

double f_map(const KernelParams& params, std::int64_t m,
             const AreaPartition& part) {
  require(part.n() == params.n && part.k() == params.k(),
          "f_map: partition does not match the kernel parameters");
  switch (part.classify(m)) {
    case Area::consensus:
    case Area::green:
      return 0.0;
    case Area::orange:
      return expected_w(params, m);
    case Area::blue1:
    case Area::red:
    case Area::blue2:
    case Area::yellow: {
      const double eu = expected_u(params, m);
      return std::min(eu, static_cast<double>(params.n) - eu);
    }
  }
  return 0.0;
}

YellowFixedPoint fixed_point_yellow(const KernelParams& params,
                                    const AreaPartition& part) {
  params.validate();
  if (params.mode != SamplingMode::with_replacement) {
    fail(ErrorCode::mode_unsupported,
         "the Yellow fixed point is defined for with-replacement sampling");
  }
  const auto& b = part.thresholds();
  const double n = static_cast<double>(params.n);
  double lo = b[2];
  double hi = b[3];
  if (!(lo > 0.0 && hi > lo && hi <= n)) {
    fail(ErrorCode::no_fixed_point, "the Yellow area is empty");
  }
  auto g = [&](double m) {
    return expected_u_real(params.n, params.k(), m) - m;
  };
  if (!(g(lo) > 0.0 && g(hi) < 0.0)) {
    fail(ErrorCode::no_fixed_point,
         "n(1 - m/n)^k - m does not change sign on the Yellow area");
  }
  while (hi - lo > 1e-6) {
    const double mid = 0.5 * (lo + hi);
    (g(mid) > 0.0 ? lo : hi) = mid;
  }
  YellowFixedPoint fp;
  fp.value = 0.5 * (lo + hi);
  fp.below = static_cast<std::int64_t>(std::floor(fp.value));
  fp.above = static_cast<std::int64_t>(std::ceil(fp.value));
  fp.residual = g(fp.value);
  return fp;
}

}  // namespace minlab
