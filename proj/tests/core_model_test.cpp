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

#include <cstdint>

#include <gtest/gtest.h>

#include "minlab/core_model.hpp"
#include "minlab/error.hpp"

namespace minlab {
namespace {

TEST(MinorityViewTest, Definition) {
  EXPECT_EQ(minority_view(10, 3), (MinorityView{3, Opinion::one}));
  EXPECT_EQ(minority_view(10, 7), (MinorityView{3, Opinion::zero}));
  // Consensus on 1: the minority label is the opinion nobody holds.
  EXPECT_EQ(minority_view(10, 10), (MinorityView{0, Opinion::zero}));
  EXPECT_EQ(minority_view(10, 0), (MinorityView{0, Opinion::one}));
  // Balanced tie resolves to opinion 1.
  EXPECT_EQ(minority_view(10, 5), (MinorityView{5, Opinion::one}));
}

TEST(MinorityViewTest, FlipSymmetry) {
  for (std::int64_t n : {4, 5, 10, 33}) {
    for (std::int64_t x = 0; x <= n; ++x) {
      const PopulationState s(n, x);
      const MinorityView a = minority_view(s);
      const MinorityView b = minority_view(s.flipped());
      EXPECT_EQ(a.size, b.size);
      if (2 * x != n) {
        EXPECT_EQ(b.opinion, opposite(a.opinion));
      }
    }
  }
}

TEST(PopulationStateTest, Invariants) {
  EXPECT_THROW(PopulationState(10, 11), Error);
  EXPECT_THROW(PopulationState(10, -1), Error);
  EXPECT_THROW(PopulationState(10, 0, Opinion::one), Error);
  EXPECT_THROW(PopulationState(10, 10, Opinion::zero), Error);
  EXPECT_NO_THROW(PopulationState(10, 1, Opinion::one));

  const PopulationState s(10, 10, Opinion::one);
  EXPECT_TRUE(s.is_consensus());
  EXPECT_TRUE(s.is_disseminated());
  EXPECT_FALSE(PopulationState(10, 10).is_disseminated());
  EXPECT_EQ(PopulationState(10, 3, Opinion::one).flipped(),
            PopulationState(10, 7, Opinion::zero));
}

TEST(AreaPartitionTest, ThresholdsMatchHighPrecision) {
  // 30-digit evaluation of the closed forms.
  const AreaPartition part(1000000, 5000);
  const auto& b = part.thresholds();
  EXPECT_NEAR(b[0], 126.85533588683431, 1e-9);
  EXPECT_NEAR(b[1], 150.40353633714381, 1e-9);
  EXPECT_NEAR(b[2], 901.0213831640672, 1e-9);
  EXPECT_NEAR(b[3], 8289.3063347785645, 1e-8);
  EXPECT_NEAR(b[4], 425661.55622300323, 1e-6);
  EXPECT_DOUBLE_EQ(b[5], 500000.0);
  EXPECT_FALSE(part.is_degenerate());
  EXPECT_FALSE(part.outside_recommended_k());
}

TEST(AreaPartitionTest, Classify) {
  const AreaPartition part(1000000, 5000);
  EXPECT_EQ(part.classify(0), Area::consensus);
  EXPECT_EQ(part.classify(1), Area::blue1);
  EXPECT_EQ(part.classify(126), Area::blue1);
  EXPECT_EQ(part.classify(127), Area::red);
  EXPECT_EQ(part.classify(140), Area::red);
  EXPECT_EQ(part.classify(150), Area::red);
  EXPECT_EQ(part.classify(151), Area::blue2);
  EXPECT_EQ(part.classify(300), Area::blue2);
  EXPECT_EQ(part.classify(902), Area::yellow);
  EXPECT_EQ(part.classify(8289), Area::yellow);
  EXPECT_EQ(part.classify(8290), Area::green);
  EXPECT_EQ(part.classify(9000), Area::green);
  EXPECT_EQ(part.classify(425662), Area::orange);
  EXPECT_EQ(part.classify(500000), Area::orange);
  EXPECT_THROW(part.classify(500001), Error);
  EXPECT_THROW(part.classify(-1), Error);
}

TEST(AreaPartitionTest, Totality) {
  for (std::int64_t n : {4, 7, 10, 100, 1001, 100000}) {
    for (std::int64_t k : {1, 2, 3, 5, 10, 57, 100, 1000, 100000}) {
      if (k > n) continue;
      const AreaPartition part(n, k);
      std::int64_t width = 0;
      for (Area a : kAllAreas) width += part.range(a).width();
      EXPECT_EQ(width, n / 2 + 1) << n << ' ' << k;
      for (std::int64_t m = 0; m <= n / 2; m += 1 + n / 997) {
        const Area a = part.classify(m);
        const AreaRange r = part.range(a);
        EXPECT_TRUE(m >= r.lo && m < r.hi) << n << ' ' << k << ' ' << m;
      }
    }
  }
}

TEST(AreaPartitionTest, DegenerateFlags) {
  const AreaPartition tiny_k(1000, 2);
  EXPECT_TRUE(tiny_k.outside_recommended_k());
  EXPECT_TRUE(tiny_k.is_degenerate());
  const AreaPartition huge_k(100, 90);
  EXPECT_TRUE(huge_k.outside_recommended_k());
  EXPECT_TRUE(huge_k.is_degenerate());
  EXPECT_EQ(huge_k.classify(0), Area::consensus);
  EXPECT_EQ(huge_k.classify(50), Area::orange);
}

TEST(AreaPartitionTest, RejectsBadArguments) {
  EXPECT_THROW(AreaPartition(3, 1), Error);
  EXPECT_THROW(AreaPartition(100, 0), Error);
}

TEST(NamesTest, RoundTrip) {
  for (Area a : kAllAreas) EXPECT_EQ(parse_area(to_string(a)), a);
  for (RuleKind r : {RuleKind::minority, RuleKind::majority, RuleKind::voter}) {
    EXPECT_EQ(parse_rule(to_string(r)), r);
  }
  EXPECT_EQ(parse_sampling("exclusive"), SamplingMode::exclusive);
  EXPECT_EQ(parse_schedule("sequential"), Schedule::sequential);
  EXPECT_FALSE(parse_rule("plurality").has_value());
}

}  // namespace
}  // namespace minlab
