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

#include "exitmfg/domain.h"

#include <cmath>
#include <vector>

#include "exitmfg/errors.h"
#include "gtest/gtest.h"

namespace exitmfg {
namespace {

SpatialDomain Corridor() {
  return SpatialDomain::Interval(
      0.0, 1.0, 0.1, [](const Coords& c) { return c[0] >= 1.0; }, 0.0);
}

TEST(DomainTest, IntervalDistancesFollowCoordinates) {
  const SpatialDomain d = Corridor();
  EXPECT_EQ(d.node_count(), 11u);
  EXPECT_NEAR(d.Distance(NodeId{2}, NodeId{7}), 0.5, 1e-12);
  const Point p = d.Canonical({3, 4, 0.04});
  EXPECT_NEAR(d.coordinates(p)[0], 0.34, 1e-12);
  EXPECT_NEAR(d.Distance(p, Point::At(0)), 0.34, 1e-12);
  EXPECT_NEAR(d.DistanceToTarget(p), 0.66, 1e-12);
}

TEST(DomainTest, CanonicalOrdersEdgeEndpoints) {
  const SpatialDomain d = Corridor();
  const Point p = d.Canonical({5, 4, 0.03});
  EXPECT_EQ(p.node, 4);
  EXPECT_EQ(p.next, 5);
  EXPECT_NEAR(p.offset, 0.07, 1e-12);
  EXPECT_EQ(d.Canonical({4, 5, 0.0}), Point::At(4));
  EXPECT_EQ(d.Canonical({4, 5, 0.1}), Point::At(5));
}

TEST(DomainTest, SnapToTargetWithinHalfACell) {
  const SpatialDomain d = Corridor();
  EXPECT_EQ(d.SnapToTarget(d.Canonical({9, 10, 0.06})), NodeId{10});
  EXPECT_FALSE(d.SnapToTarget(d.Canonical({9, 10, 0.04})).has_value());
  EXPECT_EQ(d.NearestTarget(3), 10);
}

TEST(DomainTest, LatticeDiagonals) {
  const SpatialDomain d = SpatialDomain::Grid2d(
      {0, 0}, {1, 1}, 0.25, 8, [](const Coords& c) { return c[0] >= 1.0; },
      {0, 0});
  EXPECT_EQ(d.node_count(), 25u);
  const NodeId corner = d.NearestNode({1, 1});
  EXPECT_NEAR(d.Distance(d.origin(), corner), std::sqrt(2.0), 1e-12);
  const SpatialDomain four = SpatialDomain::Grid2d(
      {0, 0}, {1, 1}, 0.25, 4, [](const Coords& c) { return c[0] >= 1.0; },
      {0, 0});
  EXPECT_NEAR(four.Distance(four.origin(), four.NearestNode({1, 1})), 2.0,
              1e-12);
}

TEST(DomainTest, GraphMetrics) {
  std::vector<Coords> nodes = {{0, 0}, {3, 0}, {3, 4}};
  std::vector<GraphEdge> edges = {{0, 1, 0.0}, {1, 2, 0.0}};
  const SpatialDomain path = SpatialDomain::Graph(
      nodes, edges, GraphMetric::kShortestPath, {2}, 0);
  EXPECT_NEAR(path.Distance(NodeId{0}, NodeId{2}), 7.0, 1e-12);
  const Path geodesic = path.Geodesic(0, 2);
  EXPECT_EQ(geodesic.nodes, (std::vector<NodeId>{0, 1, 2}));
  const SpatialDomain euclid = SpatialDomain::Graph(
      nodes, edges, GraphMetric::kEuclidean, {2}, 0);
  EXPECT_NEAR(euclid.Distance(NodeId{0}, NodeId{2}), 5.0, 1e-12);
  EXPECT_GE(euclid.geodesic_constant(), 7.0 / 5.0 - 1e-12);
}

TEST(DomainTest, BallCollectsNodesWithinRadius) {
  const SpatialDomain d = Corridor();
  EXPECT_EQ(d.Ball(5, 0.2).size(), 5u);
}

TEST(DomainTest, ErrorsNameTheProblem) {
  const SpatialDomain d = Corridor();
  EXPECT_THROW(d.CheckNode(11), DomainError);
  EXPECT_THROW(SpatialDomain::Interval(
                   0.0, 1.0, 0.1, [](const Coords&) { return false; }, 0.0)
                   .NearestTarget(0),
               DomainError);
  EXPECT_THROW(ExitCost::FromTable(d, {{3, 1.0}}), DomainError);
}

TEST(DomainTest, ExitCostLipschitzConstant) {
  const SpatialDomain d = SpatialDomain::Interval(
      0.0, 1.0, 0.1, [](const Coords& c) { return c[0] <= 0.0 || c[0] >= 1.0; },
      0.0);
  const ExitCost g = ExitCost::FromTable(d, {{0, 0.1}, {10, 0.4}});
  EXPECT_NEAR(g.lipschitz(), 0.3, 1e-12);
  EXPECT_NEAR(g.MaxValue(d), 0.4, 1e-12);
  EXPECT_TRUE(ValidateHypotheses(d, g).AllPassed());
}

}  // namespace
}  // namespace exitmfg
