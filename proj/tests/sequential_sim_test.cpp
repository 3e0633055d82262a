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
#include <random>
#include <vector>

#include <gtest/gtest.h>

#include "minlab/error.hpp"
#include "minlab/prob_kernel.hpp"
#include "minlab/sequential_sim.hpp"

namespace minlab {
namespace {

KernelParams minority(std::int64_t n, std::int64_t k) {
  return {UpdateRule::minority(k), n, SamplingMode::with_replacement};
}

BirthDeathChain symmetric_chain(std::size_t last) {
  std::vector<double> p(last + 1, 0.5);
  std::vector<double> q(last + 1, 0.5);
  q.front() = 0.0;
  p.back() = 0.0;
  return BirthDeathChain::from_rates(p, q);
}

// Expected steps from state 0 to N by dense Gaussian elimination on
// E_i = 1 + p_i E_{i+1} + q_i E_{i-1} + r_i E_i, E_N = 0.
double dense_hitting_time(const BirthDeathChain& c) {
  const std::size_t n = static_cast<std::size_t>(c.last());
  std::vector<std::vector<long double>> a(n, std::vector<long double>(n + 1, 0));
  for (std::size_t i = 0; i < n; ++i) {
    a[i][i] = c.p[i] + c.q[i];
    if (i + 1 < n) a[i][i + 1] = -static_cast<long double>(c.p[i]);
    if (i > 0) a[i][i - 1] = -static_cast<long double>(c.q[i]);
    a[i][n] = 1.0L;
  }
  for (std::size_t col = 0; col < n; ++col) {
    std::size_t pivot = col;
    for (std::size_t r = col + 1; r < n; ++r) {
      if (std::fabs(a[r][col]) > std::fabs(a[pivot][col])) pivot = r;
    }
    std::swap(a[col], a[pivot]);
    for (std::size_t r = 0; r < n; ++r) {
      if (r == col) continue;
      const long double f = a[r][col] / a[col][col];
      for (std::size_t j = col; j <= n; ++j) a[r][j] -= f * a[col][j];
    }
  }
  return static_cast<double>(a[0][n] / a[0][0]);
}

TEST(ChainTest, SmallMinorityRows) {
  const BirthDeathChain c = build_birth_death(minority(4, 3));
  EXPECT_EQ(c.last(), 4);
  EXPECT_NEAR(c.p[1], 21.0 / 64.0, 1e-15);
  EXPECT_NEAR(c.q[1], 9.0 / 64.0, 1e-15);
  EXPECT_NEAR(c.r[1], 34.0 / 64.0, 1e-15);
}

TEST(ChainTest, RowsAreStochastic) {
  const std::vector<KernelParams> cases = {
      minority(30, 3), minority(31, 8), minority(100, 25),
      {UpdateRule::majority(5), 40, SamplingMode::with_replacement},
      {UpdateRule::voter(), 40, SamplingMode::with_replacement},
      {UpdateRule::minority(5), 20, SamplingMode::exclusive}};
  for (const auto& params : cases) {
    const BirthDeathChain c = build_birth_death(params);
    EXPECT_EQ(c.p.back(), 0.0);
    EXPECT_EQ(c.q.front(), 0.0);
    for (std::size_t i = 0; i < c.p.size(); ++i) {
      EXPECT_GE(c.p[i], 0.0);
      EXPECT_GE(c.q[i], 0.0);
      EXPECT_GE(c.r[i], 0.0);
      EXPECT_NEAR(c.p[i] + c.q[i] + c.r[i], 1.0, 1e-12);
    }
  }
}

TEST(ChainTest, VoterIsSymmetric) {
  const std::int64_t n = 57;
  const BirthDeathChain c = build_birth_death(
      {UpdateRule::voter(), n, SamplingMode::with_replacement});
  for (std::int64_t i = 0; i <= n; ++i) {
    const double expected = static_cast<double>(i * (n - i)) / (n * n);
    EXPECT_NEAR(c.p[i], expected, 1e-15);
    EXPECT_NEAR(c.q[i], expected, 1e-15);
  }
}

TEST(ChainTest, RejectsMalformedRates) {
  EXPECT_THROW(BirthDeathChain::from_rates({0.5, 0.1}, {0.0, 0.5}), Error);
  EXPECT_THROW(BirthDeathChain::from_rates({0.5, 0.0}, {0.1, 0.5}), Error);
  EXPECT_THROW(BirthDeathChain::from_rates({0.7, 0.0}, {0.0, 1.2}), Error);
  EXPECT_THROW(BirthDeathChain::from_rates({0.7, 0.5, 0.0}, {0.0, 0.6, 1.0}),
               Error);
}

TEST(HittingTimeTest, SymmetricClosedForm) {
  const BirthDeathChain c = symmetric_chain(4);
  const EdgeHittingTimes t = edge_hitting_times(c);
  ASSERT_EQ(t.edge.size(), 4u);
  for (std::size_t l = 1; l <= 4; ++l) {
    EXPECT_NEAR(t.edge[l - 1], 2.0 * static_cast<double>(l), 1e-12);
  }
  EXPECT_NEAR(t.total, 20.0, 1e-12);
  EXPECT_NEAR(std::exp(lower_bound_sum(c)), 6.0, 1e-12);
  for (std::size_t last : {1u, 2u, 7u, 10u, 50u}) {
    const double nn = static_cast<double>(last);
    EXPECT_NEAR(edge_hitting_times(symmetric_chain(last)).total,
                nn * (nn + 1), 1e-9 * nn * nn);
  }
}

TEST(HittingTimeTest, SingleEdge) {
  const BirthDeathChain c = BirthDeathChain::from_rates({1.0, 0.0}, {0.0, 0.3});
  EXPECT_NEAR(edge_hitting_times(c).total, 1.0, 1e-15);
  EXPECT_EQ(lower_bound_sum(c), kNegInf);
}

TEST(HittingTimeTest, ZeroUpRateIsInfinite) {
  const BirthDeathChain c =
      BirthDeathChain::from_rates({0.5, 0.0, 0.0}, {0.0, 0.5, 0.5});
  const EdgeHittingTimes t = edge_hitting_times(c);
  EXPECT_TRUE(std::isfinite(t.edge[0]));
  EXPECT_TRUE(std::isinf(t.edge[1]));
  EXPECT_TRUE(std::isinf(t.total));
}

TEST(HittingTimeTest, RandomChainsAgreeWithDenseSolve) {
  std::mt19937_64 rng(2024);
  std::uniform_real_distribution<double> unit(0.01, 1.0);
  for (int rep = 0; rep < 200; ++rep) {
    std::vector<double> p(11, 0.0);
    std::vector<double> q(11, 0.0);
    for (std::size_t i = 0; i <= 10; ++i) {
      const double a = unit(rng);
      const double b = unit(rng);
      const double c = unit(rng);
      const double s = a + b + c;
      if (i < 10) p[i] = a / s;
      if (i > 0) q[i] = b / s;
    }
    const BirthDeathChain chain = BirthDeathChain::from_rates(p, q);
    const double tau = edge_hitting_times(chain).total;
    const double oracle = dense_hitting_time(chain);
    EXPECT_NEAR(tau, oracle, 1e-9 * oracle);
    EXPECT_NEAR(absorption_time(chain, false, true)[0], oracle, 1e-9 * oracle);
    EXPECT_LE(std::exp(lower_bound_sum(chain)), tau * (1 + 1e-12));
  }
}

TEST(AbsorptionTest, GamblersRuin) {
  const BirthDeathChain c = symmetric_chain(4);
  const std::vector<double> e = absorption_time(c, true, true);
  ASSERT_EQ(e.size(), 5u);
  for (std::size_t i = 0; i <= 4; ++i) {
    EXPECT_NEAR(e[i], static_cast<double>(i * (4 - i)), 1e-12);
  }
  EXPECT_NEAR(absorption_time(c, false, true)[0], 20.0, 1e-12);
  EXPECT_THROW(absorption_time(c, false, false), Error);
}

TEST(AbsorptionTest, MinorityExactValues) {
  const struct {
    std::int64_t n;
    double expected;
  } cases[] = {{12, 704.0783015013}, {18, 7768.2918002298},
               {24, 80995.749787946}, {30, 825753.9328167361}};
  for (const auto& c : cases) {
    const auto e = absorption_time(build_birth_death(minority(c.n, 3)), true,
                                   true);
    EXPECT_NEAR(e[static_cast<std::size_t>(c.n / 2)], c.expected,
                1e-9 * c.expected);
  }
}

TEST(AbsorptionTest, TrapIsInfinite) {
  // State 1 only moves up to 2, and 2 only moves back to 1; 0 and 3 are
  // never reached from there.
  const BirthDeathChain c =
      BirthDeathChain::from_rates({0.5, 1.0, 0.0, 0.0}, {0.0, 0.0, 1.0, 0.5});
  const auto e = absorption_time(c, true, true);
  EXPECT_EQ(e[0], 0.0);
  EXPECT_TRUE(std::isinf(e[1]));
  EXPECT_TRUE(std::isinf(e[2]));
  EXPECT_EQ(e[3], 0.0);
}

TEST(ZChainTest, IndexIdentity) {
  const KernelParams params = minority(24, 5);
  const BirthDeathChain full = build_birth_death(params);
  const ZChain z = z_chain(params);
  EXPECT_EQ(z.m, 4);
  EXPECT_EQ(z.offset, 16);
  EXPECT_TRUE(z.exact_sixth);
  ASSERT_EQ(z.chain.last(), 4);
  EXPECT_EQ(z.chain.p[0], full.p[16]);
  EXPECT_EQ(z.chain.q[0], 0.0);
  for (std::size_t i = 1; i < 4; ++i) {
    EXPECT_EQ(z.chain.p[i], full.p[16 + i]);
    EXPECT_EQ(z.chain.q[i], full.q[16 + i]);
    EXPECT_GE(z.chain.q[i], 1.0 / 3.0);
  }
  EXPECT_EQ(z.chain.p[4], 0.0);
  EXPECT_EQ(z.chain.q[4], full.q[20]);
  EXPECT_FALSE(z_chain(minority(25, 5)).exact_sixth);
}

TEST(ZChainTest, LowerBoundGrowsAndStaysBelow) {
  double prev = kNegInf;
  for (std::int64_t n : {12, 18, 24, 30}) {
    const ZChain z = z_chain(minority(n, 5));
    const double ln_l = lower_bound_sum(z.chain);
    const double ln_tau = edge_hitting_times(z.chain).log_total;
    EXPECT_GT(ln_l, prev) << n;
    EXPECT_LE(ln_l, ln_tau) << n;
    prev = ln_l;
  }
}

TEST(DriftTest, CentralBandAdoptsMajorityRarely) {
  for (std::int64_t n : {60, 120}) {
    const std::int64_t k =
        static_cast<std::int64_t>(std::ceil(5 * std::log(static_cast<double>(n))));
    for (std::int64_t i = (n + 5) / 6; 3 * i <= n; ++i) {
      const double adopt_zero = 1.0 - adopt_one_probability(minority(n, k), i);
      const double bound = std::pow(5.0 / 6.0, k) +
                           std::exp(-2.0 * k * (1.0 / 6.0) * (1.0 / 6.0));
      EXPECT_LE(adopt_zero, bound) << "n=" << n << " i=" << i;
    }
  }
}

TEST(SequentialRunTest, ConsensusStart) {
  Rng rng(1);
  const auto r = run_sequential(PopulationState(20, 0), minority(20, 3), 100,
                                rng);
  EXPECT_EQ(r.status, TerminalStatus::consensus);
  EXPECT_EQ(r.time, 0);
}

TEST(SequentialRunTest, MeanMatchesExactChain) {
  const KernelParams params = minority(12, 3);
  const double exact = absorption_time(build_birth_death(params), true, true)[6];
  double sum = 0.0;
  const int trials = 10000;
  for (int t = 0; t < trials; ++t) {
    Rng rng = trial_rng(77, static_cast<std::uint64_t>(t));
    const auto r = run_sequential(PopulationState(12, 6), params,
                                  default_max_steps(12) * 100, rng);
    ASSERT_EQ(r.status, TerminalStatus::consensus);
    sum += static_cast<double>(r.time);
  }
  EXPECT_NEAR(sum / trials, exact, 0.05 * exact);
}

TEST(SequentialRunTest, TransitionFrequencies) {
  const KernelParams params = minority(10, 3);
  const BirthDeathChain c = build_birth_death(params);
  const int reps = 100000;
  for (std::int64_t i = 1; i <= 9; ++i) {
    std::int64_t up = 0;
    std::int64_t down = 0;
    Rng rng(1000 + static_cast<std::uint64_t>(i));
    for (int rep = 0; rep < reps; ++rep) {
      const auto r = run_sequential(PopulationState(10, i), params, 1, rng);
      up += r.final_state.ones() == i + 1;
      down += r.final_state.ones() == i - 1;
    }
    for (const auto& [count, prob] :
         {std::pair{up, c.p[i]}, std::pair{down, c.q[i]}}) {
      const double sd = std::sqrt(prob * (1 - prob) / reps);
      EXPECT_NEAR(static_cast<double>(count) / reps, prob, 3 * sd)
          << "i=" << i;
    }
  }
}

TEST(SequentialRunTest, RowsOnlyOnChange) {
  Rng rng(4);
  const auto r = run_sequential(PopulationState(30, 15), minority(30, 3),
                                default_max_steps(30), rng, true);
  ASSERT_GE(r.rows.size(), 2u);
  for (std::size_t i = 1; i < r.rows.size(); ++i) {
    EXPECT_NE(r.rows[i].ones, r.rows[i - 1].ones);
    EXPECT_EQ(std::abs(r.rows[i].ones - r.rows[i - 1].ones), 1);
    EXPECT_GT(r.rows[i].t, r.rows[i - 1].t);
  }
}

TEST(SequentialRunTest, SourceIsNeverFlipped) {
  Rng rng(8);
  const auto r = run_sequential(PopulationState(8, 1, Opinion::one),
                                minority(8, 3), 1000000, rng);
  EXPECT_EQ(r.status, TerminalStatus::disseminated);
  EXPECT_EQ(r.final_state.ones(), 8);
}

TEST(SequentialRunTest, DefaultBudget) {
  EXPECT_EQ(default_max_steps(1000), 100 * 1000 * 7);
  EXPECT_EQ(default_max_steps(100000000), 1000000000);
}

}  // namespace
}  // namespace minlab
