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

#include <cmath>
#include <cstdint>
#include <vector>

#include <boost/math/distributions/binomial.hpp>
#include <gtest/gtest.h>

#include "minlab/core_model.hpp"
#include "minlab/error.hpp"
#include "minlab/prob_kernel.hpp"

namespace minlab {
namespace {

KernelParams minority(std::int64_t n, std::int64_t k) {
  return {UpdateRule::minority(k), n, SamplingMode::with_replacement};
}

// Exact coefficient for small k, used by the direct summation oracle.
long double choose(std::int64_t k, std::int64_t j) {
  long double c = 1.0L;
  for (std::int64_t i = 1; i <= j; ++i) {
    c = c * static_cast<long double>(k - j + i) / static_cast<long double>(i);
  }
  return c;
}

long double direct_range(std::int64_t k, double p, std::int64_t lo,
                         std::int64_t hi) {
  long double s = 0.0L;
  for (std::int64_t j = lo; j <= hi; ++j) {
    s += choose(k, j) * std::pow(static_cast<long double>(p), j) *
         std::pow(1.0L - static_cast<long double>(p), k - j);
  }
  return s;
}

TEST(BinomialTest, SmallExactValues) {
  EXPECT_NEAR(log_binomial_tail_geq(3, 0.5, 2), std::log(0.5), 1e-15);
  EXPECT_EQ(log_binomial_pmf(5, 0.0, 1), kNegInf);
  EXPECT_EQ(log_binomial_pmf(5, 0.0, 0), 0.0);
  EXPECT_EQ(log_binomial_pmf(5, 1.0, 5), 0.0);
  EXPECT_EQ(log_binomial_tail_geq(5, 0.3, 0), 0.0);
  EXPECT_EQ(log_binomial_tail_geq(5, 0.3, 6), kNegInf);
  EXPECT_NEAR(std::exp(log_binomial_tail_geq(20, 0.3, 10)),
              0.047961897331343476, 1e-12 * 0.047961897331343476);
}

TEST(BinomialTest, AgreesWithDirectSummation) {
  const std::vector<double> ps = {1e-6, 0.01, 0.1, 0.25, 0.3, 0.5,
                                  0.61, 0.9, 0.999};
  for (std::int64_t k = 1; k <= 30; ++k) {
    for (const double p : ps) {
      for (std::int64_t j = 0; j <= k; ++j) {
        const long double pmf = direct_range(k, p, j, j);
        const double got = std::exp(log_binomial_pmf(k, p, j));
        EXPECT_NEAR(got, static_cast<double>(pmf), 1e-12 * pmf)
            << "pmf k=" << k << " p=" << p << " j=" << j;
        const long double tail = direct_range(k, p, j, k);
        const double got_tail = std::exp(log_binomial_tail_geq(k, p, j));
        EXPECT_NEAR(got_tail, static_cast<double>(tail), 1e-12 * tail)
            << "tail k=" << k << " p=" << p << " j=" << j;
      }
      for (std::int64_t lo = 0; lo <= k; lo += 3) {
        const std::int64_t hi = std::min<std::int64_t>(k, lo + k / 3);
        const long double range = direct_range(k, p, lo, hi);
        EXPECT_NEAR(std::exp(log_binomial_range(k, p, lo, hi)),
                    static_cast<double>(range), 1e-12 * range);
      }
    }
  }
}

TEST(BinomialTest, LargeTrialsAgreeWithIncompleteBeta) {
  struct Case {
    std::int64_t k;
    double p;
    std::int64_t j;
  };
  const std::vector<Case> cases = {
      {5000, 0.4, 2100},       {5000, 0.4, 1950},
      {100000, 0.499, 50100},  {1500000, 0.4995, 749000},
      {1500000, 0.4995, 750000}, {1442612, 0.25, 361000},
      {200000, 0.01, 2100}};
  for (const auto& c : cases) {
    const boost::math::binomial_distribution<double> law(
        static_cast<double>(c.k), c.p);
    const double expected =
        boost::math::cdf(boost::math::complement(law, static_cast<double>(c.j - 1)));
    const double got = std::exp(log_binomial_tail_geq(c.k, c.p, c.j));
    EXPECT_NEAR(got, expected, 1e-9 * expected)
        << "k=" << c.k << " p=" << c.p << " j=" << c.j;
  }
}

TEST(BinomialTest, DeepTailStaysFinite) {
  const double lt = log_binomial_tail_geq(1000000, 0.1, 900000);
  EXPECT_TRUE(std::isfinite(lt));
  EXPECT_LT(lt, -1e5);
  // Complement side is computed without cancellation.
  EXPECT_NEAR(log_binomial_tail_geq(1000000, 0.1, 1), std::log1p(-std::pow(0.9, 1e6)),
              1e-15);
}

TEST(HypergeometricTest, SmallExact) {
  // 9 other nodes, 4 hold opinion 1, draw 3.
  EXPECT_NEAR(std::exp(log_hypergeometric_pmf(9, 4, 3, 1)), 40.0 / 84.0,
              1e-14);
  EXPECT_NEAR(std::exp(log_hypergeometric_range(9, 4, 3, 0, 3)), 1.0, 1e-14);
  EXPECT_EQ(log_hypergeometric_pmf(9, 4, 3, 4), kNegInf);
  // With a self-excluding node holding 0, minority adopts 1 iff B1 in {1, 3}.
  const KernelParams params{UpdateRule::minority(3), 10,
                            SamplingMode::exclusive};
  EXPECT_NEAR(adopt_one_probability(params, 4, Opinion::zero), 44.0 / 84.0,
              1e-14);
}

TEST(AdoptionTest, SmallExactValues) {
  // n=4, k=3, one node holds 1: P(B=1) + P(B=3) = 27/64 + 1/64.
  EXPECT_NEAR(adopt_one_probability(minority(4, 3), 1), 28.0 / 64.0, 1e-15);
  EXPECT_NEAR(adopt_one_probability(minority(4, 3), 2), 0.5, 1e-15);
  EXPECT_EQ(adopt_one_probability(minority(10, 3), 0), 0.0);
  EXPECT_EQ(adopt_one_probability(minority(10, 3), 10), 1.0);
  const KernelParams voter{UpdateRule::voter(), 10,
                           SamplingMode::with_replacement};
  EXPECT_NEAR(adopt_one_probability(voter, 3), 0.3, 1e-15);
  // Majority, k=3, p=1/4: P(B >= 2) = 10/64.
  const KernelParams majority{UpdateRule::majority(3), 4,
                              SamplingMode::with_replacement};
  EXPECT_NEAR(adopt_one_probability(majority, 1), 10.0 / 64.0, 1e-15);
}

TEST(AdoptionTest, EvenKTiesSplitEvenly) {
  // k=2, p=1/2: B=0 -> 0, B=2 -> 1, B=1 is a tie.
  EXPECT_NEAR(adopt_one_probability(minority(10, 2), 5), 0.5, 1e-15);
  // k=4, n=4, one node holds 1: P(B=1) = 108/256, P(B=2)/2 = 27/256,
  // P(B=4) = 1/256.
  EXPECT_NEAR(adopt_one_probability(minority(4, 4), 1), 136.0 / 256.0, 1e-15);
}

TEST(AdoptionTest, RelabelSymmetry) {
  for (const RuleKind kind : {RuleKind::minority, RuleKind::majority}) {
    for (std::int64_t k : {1, 2, 3, 4, 7, 12, 25}) {
      const KernelParams params{UpdateRule{kind, k}, 40,
                                SamplingMode::with_replacement};
      for (std::int64_t x = 0; x <= 40; ++x) {
        EXPECT_NEAR(adopt_one_probability(params, x),
                    1.0 - adopt_one_probability(params, 40 - x), 1e-13)
            << "k=" << k << " x=" << x;
      }
    }
  }
}

TEST(NodeEventsTest, ConsensusAndBalance) {
  const NodeEventProbs at_zero = node_event_probs(minority(100, 5), 0,
                                                  Opinion::one);
  EXPECT_EQ(at_zero.unanimity_majority, 1.0);
  EXPECT_EQ(at_zero.wrong_minority_sample, 0.0);
  const NodeEventProbs half = node_event_probs(minority(100, 5), 50,
                                               Opinion::one);
  EXPECT_NEAR(half.wrong_minority_sample, 0.5, 1e-15);
  EXPECT_NEAR(half.unanimity_majority, 1.0 / 32.0, 1e-15);
  EXPECT_NEAR(half.unanimity_minority, 1.0 / 32.0, 1e-15);
}

TEST(NodeEventsTest, LabelDoesNotMatter) {
  for (std::int64_t k : {2, 3, 6, 11}) {
    for (std::int64_t m = 0; m <= 30; ++m) {
      const auto a = node_event_probs(minority(60, k), m, Opinion::one);
      const auto b = node_event_probs(minority(60, k), m, Opinion::zero);
      EXPECT_NEAR(a.wrong_minority_sample, b.wrong_minority_sample, 1e-14);
      EXPECT_NEAR(a.unanimity_majority, b.unanimity_majority, 1e-14);
      EXPECT_NEAR(a.adopt_one, 1.0 - b.adopt_one, 1e-14);
    }
  }
}

TEST(NodeEventsTest, WrongEventsAreDisjoint) {
  for (std::int64_t n : {10, 101, 1000}) {
    for (std::int64_t k : {1, 2, 3, 8, 21, 64}) {
      for (std::int64_t m = 1; 2 * m <= n; ++m) {
        const auto e = node_event_probs(minority(n, k), m, Opinion::one);
        EXPECT_LE(e.wrong_minority_sample + e.unanimity_majority,
                  1.0 + 1e-15);
      }
    }
  }
}

TEST(NodeEventsTest, UnderflowIsFlagged) {
  const auto e = node_event_probs(minority(1000000, 5000), 499000,
                                  Opinion::one);
  EXPECT_TRUE(e.underflow);
  EXPECT_EQ(e.unanimity_majority, 0.0);
  EXPECT_EQ(e.unanimity_minority, 0.0);
}

TEST(ExpectedUTest, Examples) {
  EXPECT_EQ(expected_u(minority(100, 5), 0), 100.0);
  EXPECT_NEAR(expected_u(minority(100, 5), 50), 3.125, 1e-13);
  const double small = expected_u(minority(1000000, 5000), 8290);
  EXPECT_NEAR(small, 8.3842172167267057e-13, 1e-9 * 8.3842172167267057e-13);
  EXPECT_LE(small, 1e-6 / 1e6);
}

TEST(ExpectedUTest, StrictlyDecreasing) {
  for (std::int64_t k : {2, 5, 40}) {
    const KernelParams params = minority(500, k);
    double prev = expected_u(params, 0);
    for (std::int64_t m = 1; m <= 250; ++m) {
      const double cur = expected_u(params, m);
      EXPECT_LT(cur, prev) << "k=" << k << " m=" << m;
      prev = cur;
    }
  }
}

TEST(ExpectedWTest, Examples) {
  EXPECT_NEAR(expected_w(minority(4, 3), 1), 0.625, 1e-15);
  const std::int64_t n = 1000000;
  const std::int64_t m = static_cast<std::int64_t>(
      std::floor(n / 2.0 - n * std::sqrt(1.5 * std::log(1e6) / 5000.0)));
  ASSERT_EQ(m, 435621);
  const double w = expected_w(minority(n, 5000), m);
  // Even k: half the tie mass at B = 2500 counts.
  EXPECT_NEAR(w, 3.0600949051775151e-14, 1e-9 * 3.0600949051775151e-14);
  EXPECT_LE(w, 1.0 / (1e6 * 1e6));
}

TEST(ExpectedWTest, SymmetryPointOddK) {
  for (std::int64_t k = 3; k <= 25; k += 2) {
    for (std::int64_t n : {10, 100, 1000}) {
      EXPECT_NEAR(expected_w(minority(n, k), n / 2), n / 2.0, 1e-12 * n / 2.0);
    }
  }
}

TEST(ExpectedWTest, HoeffdingSandwich) {
  for (std::int64_t n : {200, 1000, 5000}) {
    const double lnn = std::log(static_cast<double>(n));
    for (std::int64_t k = static_cast<std::int64_t>(std::ceil(5 * lnn));
         k <= n / 2; k = k * 3 / 2 + 1) {
      const KernelParams params = minority(n, k);
      for (std::int64_t m = 0; 2 * m <= n; m += std::max<std::int64_t>(1, n / 200)) {
        const double d = 0.5 - static_cast<double>(m) / n;
        const double w = expected_w(params, m);
        EXPECT_LE(w, n * std::exp(-2.0 * k * d * d) * (1 + 1e-12))
            << "n=" << n << " k=" << k << " m=" << m;
        if (4 * m >= n) {
          EXPECT_GE(w, n / 4.0 * std::exp(-4.0 * k * d * d) * (1 - 1e-12))
              << "n=" << n << " k=" << k << " m=" << m;
        }
      }
    }
  }
}

TEST(FMapTest, Pieces) {
  const KernelParams params = minority(1000000, 5000);
  const AreaPartition part(1000000, 5000);
  EXPECT_EQ(f_map(params, 0, part), 0.0);
  EXPECT_NEAR(f_map(params, 300, part), 223079.95146909777, 1e-6);
  EXPECT_EQ(f_map(params, 10000, part), 0.0);  // Green
  const KernelParams odd = minority(1000, 7);
  EXPECT_NEAR(f_map(odd, 500, AreaPartition(1000, 7)), 500.0, 1e-10);
  EXPECT_THROW(f_map(odd, 500, part), Error);
}

TEST(FixedPointTest, YellowRoot) {
  const KernelParams params = minority(1000000, 5000);
  const AreaPartition part(1000000, 5000);
  const YellowFixedPoint fp = fixed_point_yellow(params, part);
  EXPECT_NEAR(fp.value, 1324.4706025, 1e-5);
  EXPECT_EQ(fp.below, 1324);
  EXPECT_EQ(fp.above, 1325);
  EXPECT_LE(std::abs(fp.residual), 1e-3);
  const auto& b = part.thresholds();
  EXPECT_GT(expected_u_real(1000000, 5000, b[2]) - b[2], 0.0);
  EXPECT_LT(expected_u_real(1000000, 5000, b[3]) - b[3], 0.0);
}

TEST(FixedPointTest, Errors) {
  EXPECT_THROW(
      {
        try {
          fixed_point_yellow(minority(1000, 2), AreaPartition(1000, 2));
        } catch (const Error& e) {
          EXPECT_EQ(e.code(), ErrorCode::no_fixed_point);
          throw;
        }
      },
      Error);
  const KernelParams exclusive{UpdateRule::minority(5000), 1000000,
                               SamplingMode::exclusive};
  EXPECT_THROW(fixed_point_yellow(exclusive, AreaPartition(1000000, 5000)),
               Error);
}

TEST(KernelParamsTest, Validation) {
  EXPECT_THROW(minority(1, 1).validate(), Error);
  EXPECT_THROW(minority(10, 0).validate(), Error);
  const KernelParams exclusive{UpdateRule::minority(10), 10,
                               SamplingMode::exclusive};
  EXPECT_THROW(exclusive.validate(), Error);
  EXPECT_THROW(expected_u(minority(10, 3), 6), Error);
}

}  // namespace
}  // namespace minlab
