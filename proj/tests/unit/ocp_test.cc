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

#include "exitmfg/ocp.h"

#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

#include "exitmfg/domain.h"
#include "exitmfg/errors.h"
#include "exitmfg/measures.h"
#include "gtest/gtest.h"
#include "support/oracles.h"

namespace exitmfg {
namespace {

constexpr double kMinSpeed = 0.5;
constexpr double kMaxSpeed = 1.5;

SpatialDomain Corridor(double dx) {
  return SpatialDomain::Interval(
      0.0, 1.0, dx, [](const Coords& c) { return c[0] <= 0.0 || c[0] >= 1.0; },
      0.0);
}

// Exit costs at both ends with L_g k_max < 1.
ExitCost RandomCost(const SpatialDomain& d, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> g(0.0, 0.6);
  const NodeId last = static_cast<NodeId>(d.node_count()) - 1;
  return ExitCost::FromTable(d, {{0, g(rng)}, {last, g(rng)}});
}

TEST(OcpTest, ConstantSpeedValueIsDistanceOverSpeed) {
  const SpatialDomain d = Corridor(0.01);
  const ExitCost g = ExitCost::FromTable(d, {{0, 0.0}, {100, 0.25}});
  const TimeGrid grid = DefaultTimeGrid(d, 2.0, 2.0);
  const ValueField phi =
      SolveValue(d, g, SpeedField::Constant(grid, d.node_count(), 2.0));
  for (NodeId x = 0; x <= 100; ++x) {
    const double expected = testing::ConstantSpeedValue(d, g, 2.0, x);
    EXPECT_NEAR(phi.at(0, x), expected, 1e-9) << d.Describe(x);
    EXPECT_NEAR(phi.at(grid.steps, x), expected, 1e-9) << d.Describe(x);
  }
  // The kink sits where x / 2 = (1 - x) / 2 + 0.25, at x = 0.75.
  EXPECT_NEAR(phi.at(0, 75), 0.375, 1e-9);
}

TEST(OcpTest, ValueMatchesEarliestArrivalSearch) {
  std::mt19937_64 rng(21);
  const SpatialDomain d = Corridor(0.02);
  for (int trial = 0; trial < 10; ++trial) {
    const ExitCost g = RandomCost(d, rng);
    const TimeGrid grid = DefaultTimeGrid(d, kMaxSpeed, 3.0);
    const SpeedField k =
        testing::RandomSpeedField(d, grid, kMinSpeed, kMaxSpeed, 100 + trial);
    const ValueField phi = SolveValue(d, g, k);
    const double tol = 4.0 * (grid.dt + d.resolution());
    for (NodeId x = 0; x < static_cast<NodeId>(d.node_count()); ++x) {
      EXPECT_NEAR(phi.at(0, x), testing::EarliestExitCost(d, g, k, 0, x), tol)
          << "trial " << trial << " at " << d.Describe(x);
    }
  }
}

TEST(OcpTest, ValueMatchesEarliestArrivalSearchOnLattice) {
  const SpatialDomain d = SpatialDomain::Grid2d(
      {0, 0}, {1, 1}, 0.05, 8, [](const Coords& c) { return c[0] >= 1.0; },
      {0, 0});
  const ExitCost g = ExitCost::Constant(d, 0.0);
  const TimeGrid grid = DefaultTimeGrid(d, kMaxSpeed, 4.0);
  const SpeedField k =
      testing::RandomSpeedField(d, grid, kMinSpeed, kMaxSpeed, 7);
  const ValueField phi = SolveValue(d, g, k);
  const double tol = 4.0 * (grid.dt + d.resolution());
  for (NodeId x = 0; x < static_cast<NodeId>(d.node_count()); x += 3) {
    EXPECT_NEAR(phi.at(0, x), testing::EarliestExitCost(d, g, k, 0, x), tol)
        << d.Describe(x);
  }
}

TEST(OcpTest, SynthesizedCostMatchesValue) {
  std::mt19937_64 rng(8);
  const SpatialDomain d = Corridor(0.02);
  const ExitCost g = RandomCost(d, rng);
  const TimeGrid grid = DefaultTimeGrid(d, kMaxSpeed, 3.0);
  const SpeedField k = testing::RandomSpeedField(d, grid, kMinSpeed, kMaxSpeed, 9);
  const ValueField phi = SolveValue(d, g, k);
  const double tol = 4.0 * (grid.dt + d.resolution());
  for (NodeId x = 0; x < static_cast<NodeId>(d.node_count()); ++x) {
    const Trajectory t = SynthesizeOptimal(d, g, phi, k, 0, Point::At(x));
    const double realized = RealizedCost(d, t, grid, g);
    EXPECT_NEAR(realized, phi.at(0, x), tol) << d.Describe(x);
    EXPECT_TRUE(IsAdmissible(d, t, k, d.resolution()).admissible);
    const DppReport dpp = CheckDpp(d, phi, t);
    EXPECT_GE(dpp.inequality_residual, -1e-9);
  }
}

TEST(OcpTest, OffNodeStartLeavesThroughTheCheaperEnd) {
  const SpatialDomain d = Corridor(0.1);
  const ExitCost g = ExitCost::Constant(d, 0.0);
  const TimeGrid grid = DefaultTimeGrid(d, 1.0, 2.0);
  const SpeedField k = SpeedField::Constant(grid, d.node_count(), 1.0);
  const ValueField phi = SolveValue(d, g, k);
  const Trajectory t =
      SynthesizeOptimal(d, g, phi, k, 0, d.Canonical({7, 8, 0.08}));
  ASSERT_TRUE(t.exit_index.has_value());
  EXPECT_EQ(t.samples[*t.exit_index], Point::At(10));
  EXPECT_NEAR(FirstExitTime(d, t, grid), 0.3, grid.dt + 1e-12);
}

TEST(OcpTest, DppInequalityAlongRandomAdmissibleTrajectories) {
  std::mt19937_64 rng(13);
  const SpatialDomain d = Corridor(0.02);
  const ExitCost g = RandomCost(d, rng);
  TimeGrid grid;
  grid.dt = d.resolution() / kMinSpeed;
  grid.steps = static_cast<int>(std::ceil(3.0 / grid.dt));
  const SpeedField k = testing::RandomSpeedField(d, grid, kMinSpeed, kMaxSpeed, 14);
  const ValueField phi = SolveValue(d, g, k);
  std::uniform_int_distribution<int> move(-1, 1);
  std::uniform_int_distribution<NodeId> start(1, 49);
  for (int walk = 0; walk < 100; ++walk) {
    Trajectory t;
    NodeId x = start(rng);
    t.samples.push_back(Point::At(x));
    for (int j = 0; j < grid.steps; ++j) {
      if (!d.IsTarget(x)) x = std::clamp<NodeId>(x + move(rng), 0, 50);
      t.samples.push_back(Point::At(x));
    }
    ASSERT_TRUE(IsAdmissible(d, t, k, 0.0).admissible);
    for (int j = 0; j < grid.steps; ++j) {
      const NodeId a = t.samples[j].node;
      if (d.IsTarget(a)) break;
      for (int h = j + 1; h <= grid.steps; ++h) {
        const double lhs = phi.at(h, t.samples[h].node) + (h - j) * grid.dt;
        ASSERT_GE(lhs - phi.at(j, a), -1e-9) << "walk " << walk;
        if (d.IsTarget(t.samples[h].node)) break;
      }
    }
  }
}

TEST(OcpTest, FasterFieldsGiveSmallerValues) {
  const SpatialDomain d = Corridor(0.02);
  std::mt19937_64 rng(4);
  const ExitCost g = RandomCost(d, rng);
  const TimeGrid grid = DefaultTimeGrid(d, 2 * kMaxSpeed, 3.0);
  const SpeedField slow = testing::RandomSpeedField(d, grid, kMinSpeed, kMaxSpeed, 1);
  SpeedField fast(grid, d.node_count(), kMinSpeed, 2 * kMaxSpeed);
  std::uniform_real_distribution<double> boost(1.0, 2.0);
  for (int j = 0; j <= grid.steps; ++j) {
    for (NodeId x = 0; x < static_cast<NodeId>(d.node_count()); ++x) {
      fast.at(j, x) = slow.at(j, x) * boost(rng);
    }
  }
  const ValueField a = SolveValue(d, g, slow);
  const ValueField b = SolveValue(d, g, fast);
  for (int j = 0; j <= grid.steps; ++j) {
    for (NodeId x = 0; x < static_cast<NodeId>(d.node_count()); ++x) {
      ASSERT_GE(a.at(j, x), b.at(j, x) - 1e-9);
    }
  }
}

TEST(OcpTest, ValueTimeQuotientStaysAboveMinusOne) {
  const SpatialDomain d = Corridor(0.02);
  std::mt19937_64 rng(6);
  const ExitCost g = RandomCost(d, rng);
  const TimeGrid grid = DefaultTimeGrid(d, kMaxSpeed, 3.0);
  const SpeedField k = testing::RandomSpeedField(d, grid, kMinSpeed, kMaxSpeed, 2);
  const ValueField phi = SolveValue(d, g, k);
  const RegularityReport r = CheckValueRegularity(d, phi, 1.0, 400, 1);
  EXPECT_GT(r.min_time_quotient, -1.0);
  EXPECT_TRUE(r.time_floor_holds);
}

TEST(OcpTest, BoundsFollowTheExplicitFormulas) {
  const SpatialDomain d = Corridor(0.1);
  const ExitCost g = ExitCost::FromTable(d, {{0, 0.2}, {10, 0.1}});
  // G_0 = g(y_0) with y_0 = 0 the target nearest the origin.
  EXPECT_NEAR(HorizonBound(d, g, 0.5, 0.4), 0.2 + 0.0 + 0.4 / 0.5, 1e-12);
  EXPECT_NEAR(TrajectoryBound(1.0, 2.0, 0.4), 2.4, 1e-12);
}

TEST(OcpTest, ShortHorizonIsRejected) {
  const SpatialDomain d = Corridor(0.1);
  const ExitCost g = ExitCost::Constant(d, 0.0);
  const TimeGrid grid = DefaultTimeGrid(d, 1.0, 0.5);
  SolveOptions options;
  options.required_horizon = 2.0;
  EXPECT_THROW(
      SolveValue(d, g, SpeedField::Constant(grid, d.node_count(), 1.0), options),
      HorizonError);
}

TEST(OcpTest, SpeedFieldValidation) {
  TimeGrid grid{0.1, 2};
  SpeedField k(grid, 3, 0.5, 1.0);
  k.at(0, 0) = 0.4;
  EXPECT_THROW(k.Validate(), PreconditionError);
}

}  // namespace
}  // namespace exitmfg
