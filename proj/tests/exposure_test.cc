// Copyright 2026 The Statanon Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "statanon/exposure.hpp"

#include <cmath>
#include <string>
#include <vector>

#include <gtest/gtest.h>

#include "statanon/distribution.hpp"
#include "statanon/random.hpp"
#include "statanon/rational.hpp"
#include "test_util.hpp"

namespace statanon {
namespace {

TEST(ExposureTest, StrictInequalityExcludesMassAtThreshold) {
  const auto d = DiscreteDistribution::Empirical({"a", "b"}, {1, 1});
  EXPECT_EQ(Exposure(d, MakeRational(1, 2)), Rational(0));
  EXPECT_EQ(Exposure(d, MakeRational(51, 100)), Rational(1));
  EXPECT_EQ(Exposure(d, Rational(1)), Rational(1));
  EXPECT_EQ(Exposure(d, MakeRational(1, 100)), Rational(0));
}

TEST(ExposureTest, MixedMassesAccumulateOnlyBelow) {
  const auto d = DiscreteDistribution::Empirical({"a", "b", "c"}, {1, 2, 5});
  EXPECT_EQ(Exposure(d, MakeRational(1, 8)), Rational(0));
  EXPECT_EQ(Exposure(d, MakeRational(2, 8)), MakeRational(1, 8));
  EXPECT_EQ(Exposure(d, MakeRational(3, 8)), MakeRational(3, 8));
  EXPECT_EQ(Exposure(d, MakeRational(5, 8)), MakeRational(3, 8));
  EXPECT_EQ(Exposure(d, MakeRational(6, 8)), Rational(1));
}

TEST(ExposureTest, ZeroCountValuesCarryNoMass) {
  const auto d = DiscreteDistribution::Empirical({"a", "b"}, {0, 4});
  EXPECT_EQ(Exposure(d, MakeRational(1, 2)), Rational(0));
  EXPECT_EQ(Exposure(d, MakeRational(999, 1000)), Rational(0));
}

TEST(ExposureCurveTest, BreakpointsAndStepValues) {
  const auto d = DiscreteDistribution::Empirical({"a", "b", "c"}, {1, 2, 5});
  const auto curve = MakeExposureCurve(d);
  ASSERT_TRUE(curve.exact());
  ASSERT_EQ(curve.points().size(), 3u);
  EXPECT_EQ(curve.points()[0].level_r, MakeRational(1, 8));
  EXPECT_EQ(curve.points()[1].level_r, MakeRational(2, 8));
  EXPECT_EQ(curve.points()[2].level_r, MakeRational(5, 8));
  EXPECT_EQ(curve.points()[0].cum_below_r, Rational(0));
  EXPECT_EQ(curve.points()[1].cum_below_r, MakeRational(1, 8));
  EXPECT_EQ(curve.points()[2].cum_below_r, MakeRational(3, 8));
  EXPECT_EQ(curve.value_count(), 3u);
}

TEST(ExposureCurveTest, EqualLevelsMerge) {
  const auto d = DiscreteDistribution::Empirical({"a", "b", "c"}, {2, 2, 4});
  const auto curve = MakeExposureCurve(d);
  ASSERT_EQ(curve.points().size(), 2u);
  EXPECT_EQ(curve.points()[0].mass_r, MakeRational(1, 2));
  EXPECT_EQ(curve.value_count(), 3u);
}

TEST(ExposureCurveTest, ValueAtMatchesDirectExposureEverywhere) {
  Rng rng(2026);
  for (int trial = 0; trial < 50; ++trial) {
    const auto table = testutil::RandomTable(rng);
    const auto d = EmpiricalDistribution(table, AllColumns(table));
    const auto curve = MakeExposureCurve(d);
    std::vector<Rational> probes;
    for (const auto& pt : curve.points()) {
      probes.push_back(pt.level_r);
      probes.push_back(pt.level_r / 2);
      probes.push_back(pt.level_r + MakeRational(1, 1000000));
    }
    probes.push_back(Rational(1));
    for (const auto& t : probes) {
      if (t <= 0 || t > 1) continue;
      EXPECT_EQ(curve.ValueAt(t), Exposure(d, t));
    }
  }
}

TEST(ExposureCurveTest, DoublePathTracksExactPathBetweenBreakpoints) {
  // Double-precision thresholds are only meaningful away from the
  // breakpoints (ties are ±1 ulp fuzzy); probe between adjacent levels.
  Rng rng(7);
  for (int trial = 0; trial < 30; ++trial) {
    const auto d = testutil::RandomEmpirical(rng);
    const auto curve = MakeExposureCurve(d);
    const auto& pts = curve.points();
    const double below_first = pts.front().level * 0.5;
    if (below_first > 0.0)
      EXPECT_DOUBLE_EQ(curve.ValueAt(below_first), 0.0);
    for (std::size_t i = 0; i + 1 < pts.size(); ++i) {
      const double t = std::sqrt(pts[i].level * pts[i + 1].level);
      if (!(t > pts[i].level && t < pts[i + 1].level)) continue;
      EXPECT_NEAR(curve.ValueAt(t), ToDouble(pts[i + 1].cum_below_r), 1e-12);
    }
    EXPECT_NEAR(curve.ValueAt(1.0), ToDouble(Exposure(d, Rational(1))), 1e-12);
  }
}

TEST(RowMultiplicityExposureTest, CountsRowsBelowK) {
  // 4 rows: "0" twice, "1" once, redacted once → multiplicities 2,1,1.
  const auto t = CategoricalTable::Create({{"c", {"0", "1"}}},
                                          {"0", "0", "1", Redacted()});
  EXPECT_EQ(RowMultiplicityExposure(t, std::vector<std::size_t>{0}, 1), Rational(0));
  EXPECT_EQ(RowMultiplicityExposure(t, std::vector<std::size_t>{0}, 2),
            MakeRational(1, 2));
  EXPECT_EQ(RowMultiplicityExposure(t, std::vector<std::size_t>{0}, 3), Rational(1));
}

TEST(ExposureOracleTest, MatchesBruteForceRowCounting) {
  Rng rng(11);
  for (int trial = 0; trial < 100; ++trial) {
    const auto table = testutil::RandomTable(rng, 20, 3, 3);
    const auto cols = testutil::AllIds(table);
    const auto d = EmpiricalDistribution(table, cols);
    for (int probe = 0; probe < 5; ++probe) {
      const auto num = rng.NextInt(1, 30);
      const auto den = rng.NextInt(num, 40);
      const Rational t = MakeRational(num, den);
      EXPECT_EQ(Exposure(d, t), testutil::BruteForceExposure(table, cols, t));
    }
  }
}

}  // namespace
}  // namespace statanon
