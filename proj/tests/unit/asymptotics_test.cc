// Copyright 2026 The exitmfg Authors
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

#include "exitmfg/asymptotics.h"

#include <cmath>
#include <vector>

#include "exitmfg/domain.h"
#include "exitmfg/errors.h"
#include "exitmfg/measures.h"
#include "gtest/gtest.h"

namespace exitmfg {
namespace {

SpatialDomain HalfLine() {
  return SpatialDomain::Interval(
      0.0, 2.0, 0.1, [](const Coords& c) { return c[0] <= 0.0; }, 0.0);
}

Trajectory Path(std::vector<NodeId> nodes) {
  Trajectory t;
  for (NodeId n : nodes) t.samples.push_back(Point::At(n));
  return t;
}

TEST(AsymptoticsTest, LimitAndSettling) {
  const SpatialDomain d = HalfLine();
  const TimeGrid grid{0.1, 5};
  TrajectoryEnsemble q(grid);
  q.Add(Path({2, 1, 0, 0, 0, 0}), 0.5);
  q.Add(Path({3, 2, 1, 0, 0, 0}), 0.5);
  EXPECT_TRUE(LimitMeasure(d, q) == ParticleMeasure::Dirac(Point::At(0)));
  ASSERT_TRUE(SettlingTime(q).has_value());
  EXPECT_NEAR(*SettlingTime(q), 0.3, 1e-12);

  TrajectoryEnsemble moving(grid);
  moving.Add(Path({5, 4, 3, 2, 1, 0}), 1.0);
  EXPECT_THROW(LimitMeasure(d, moving), HorizonError);
  EXPECT_FALSE(SettlingTime(moving).has_value());
}

TEST(AsymptoticsTest, CurveAgainstTheLimit) {
  const SpatialDomain d = HalfLine();
  const TimeGrid grid{0.1, 5};
  TrajectoryEnsemble q(grid);
  q.Add(Path({3, 2, 1, 0, 0, 0}), 1.0);
  const ConvergenceCurve c =
      ComputeConvergenceCurve(d, q, {0.0, 0.1, 0.2, 0.3, 0.5}, 1);
  const std::vector<double> expected = {0.3, 0.2, 0.1, 0.0, 0.0};
  ASSERT_EQ(c.values.size(), expected.size());
  for (std::size_t i = 0; i < expected.size(); ++i) {
    EXPECT_NEAR(c.values[i], expected[i], 1e-12);
  }
}

TEST(AsymptoticsTest, TailBoundByHand) {
  const SpatialDomain d = HalfLine();
  const ExitCost g = ExitCost::Constant(d, 0.0);
  const BoundConstants b = DeriveBoundConstants(d, g, 0.5, 1.0);
  EXPECT_NEAR(b.alpha, 0.5, 1e-15);
  EXPECT_NEAR(b.t0, 0.0, 1e-15);
  const ParticleMeasure m0({{Point::At(5), 0.5}, {Point::At(15), 0.5}});
  // At t = 2 only the atom at 1.5 lies beyond alpha t = 1;
  // psi(1.5) = 1 * 1.5 / 0.5 + 1.5 = 4.5.
  EXPECT_NEAR(TailBound(d, m0, b, 2.0, 1), 2.0 * 0.5 * 4.5, 1e-12);
  EXPECT_NEAR(TailBound(d, m0, b, 4.0, 1), 0.0, 1e-15);
}

TEST(AsymptoticsTest, RateFitsRecoverSyntheticLaws) {
  ConvergenceCurve power, expo;
  for (int i = 1; i <= 40; ++i) {
    const double t = 0.25 * i;
    power.times.push_back(t);
    power.values.push_back(3.0 * std::pow(t, -2.0));
    expo.times.push_back(t);
    expo.values.push_back(t * std::exp(-1.5 * t));
  }
  const RateFit a = FitDecayRate(power, 1.0, 10.0, FitMode::kPower, 1);
  EXPECT_NEAR(a.exponent, -2.0, 1e-9);
  EXPECT_NEAR(a.residual, 0.0, 1e-9);
  const RateFit b = FitDecayRate(expo, 1.0, 10.0, FitMode::kExponential, 1);
  EXPECT_NEAR(b.rate, 1.5, 1e-9);
  power.values[8] = 0.0;
  EXPECT_THROW(FitDecayRate(power, 1.0, 10.0, FitMode::kPower, 1), RangeError);
}

}  // namespace
}  // namespace exitmfg
