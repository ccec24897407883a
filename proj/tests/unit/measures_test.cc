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

#include "exitmfg/measures.h"

#include <cmath>
#include <optional>
#include <random>
#include <vector>

#include "exitmfg/domain.h"
#include "exitmfg/errors.h"
#include "gtest/gtest.h"

namespace exitmfg {
namespace {

SpatialDomain Corridor() {
  return SpatialDomain::Interval(
      0.0, 1.0, 0.1, [](const Coords& c) { return c[0] >= 1.0; }, 0.0);
}

Trajectory Path(std::vector<NodeId> nodes) {
  Trajectory t;
  for (NodeId n : nodes) t.samples.push_back(Point::At(n));
  return t;
}

TEST(MeasuresTest, AtomsAreMergedAndSorted) {
  const ParticleMeasure m({{Point::At(3), 0.25},
                           {Point::At(1), 0.25},
                           {Point::At(3), 0.5},
                           {Point::At(5), 0.0}});
  ASSERT_EQ(m.size(), 2u);
  EXPECT_EQ(m.atoms()[0].location, Point::At(1));
  EXPECT_DOUBLE_EQ(m.atoms()[1].weight, 0.75);
  EXPECT_TRUE(m.IsNormalized());
  EXPECT_THROW(ParticleMeasure({{Point::At(1), -0.1}}), PreconditionError);
}

TEST(MeasuresTest, PushforwardAndMoments) {
  const SpatialDomain d = Corridor();
  const ParticleMeasure m({{Point::At(2), 0.5}, {Point::At(4), 0.5}});
  const ParticleMeasure shifted = Pushforward(
      d, m, [](const Point& p) -> std::optional<Point> {
        return Point::At(p.node + 1);
      });
  EXPECT_EQ(shifted.atoms()[0].location, Point::At(3));
  EXPECT_NEAR(PMoment(d, m, 1.0), 0.3, 1e-12);
  EXPECT_NEAR(PMoment(d, m, 2.0), 0.5 * 0.04 + 0.5 * 0.16, 1e-12);
  EXPECT_THROW(Pushforward(d, m,
                           [](const Point&) -> std::optional<Point> {
                             return std::nullopt;
                           }),
               PreconditionError);
}

TEST(MeasuresTest, ProjectionGoesToTheClosestNode) {
  const SpatialDomain d = Corridor();
  const ParticleMeasure m({{d.Canonical({2, 3, 0.07}), 1.0}});
  EXPECT_EQ(ProjectToNodes(d, m).atoms()[0].location, Point::At(3));
}

TEST(MeasuresTest, QuantileSamplingIsDeterministic) {
  const SpatialDomain d = Corridor();
  std::vector<double> density(d.node_count(), 1.0);
  const ParticleMeasure a =
      SampleFromDensity(d, density, 100, SamplingMode::kQuantile, 1);
  const ParticleMeasure b =
      SampleFromDensity(d, density, 100, SamplingMode::kQuantile, 2);
  EXPECT_TRUE(a == b);
  EXPECT_TRUE(a.IsNormalized());
  const ParticleMeasure c =
      SampleFromDensity(d, density, 100, SamplingMode::kIid, 3);
  EXPECT_TRUE(c == SampleFromDensity(d, density, 100, SamplingMode::kIid, 3));
}

TEST(MeasuresTest, EnsembleMarginals) {
  const TimeGrid grid{0.1, 3};
  TrajectoryEnsemble q(grid);
  q.Add(Path({2, 1, 0, 0}), 0.5);
  q.Add(Path({2, 3, 4, 5}), 0.25);
  q.Add(Path({2, 1, 0, 0}), 0.25);
  EXPECT_EQ(q.size(), 2u);
  EXPECT_TRUE(q.InitialMarginal() == ParticleMeasure::Dirac(Point::At(2)));
  const ParticleMeasure m = q.TimeMarginal(0.2);
  ASSERT_EQ(m.size(), 2u);
  EXPECT_DOUBLE_EQ(m.atoms()[0].weight, 0.75);
  EXPECT_THROW(q.Add(Path({1, 2}), 0.1), PreconditionError);
  EXPECT_THROW(q.MarginalAt(4), RangeError);
}

TEST(MeasuresTest, MixingKeepsTheInitialMarginalExactly) {
  const TimeGrid grid{0.1, 2};
  std::mt19937_64 rng(2);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::vector<Atom> atoms;
  for (int i = 0; i < 200; ++i) {
    atoms.push_back({Point::At(static_cast<NodeId>(i % 7)), 0.005});
  }
  const ParticleMeasure m0(atoms);
  TrajectoryEnsemble q(grid);
  for (const Atom& a : m0.atoms()) q.Add(Path({a.location.node, 0, 0}), a.weight);
  for (int n = 1; n < 40; ++n) {
    TrajectoryEnsemble r(grid);
    for (const Atom& a : m0.atoms()) {
      r.Add(Path({a.location.node, static_cast<NodeId>(n % 5),
                  static_cast<NodeId>(n % 3)}),
            a.weight);
    }
    q = TrajectoryEnsemble::Mix(q, r, 1.0 / (n + 1) + 0.1 * unit(rng));
    ASSERT_TRUE(q.InitialMarginal() == m0) << "after " << n << " mixes";
  }
}

TEST(MeasuresTest, MixPrunesTinyWeights) {
  const TimeGrid grid{0.1, 1};
  TrajectoryEnsemble a(grid), b(grid);
  a.Add(Path({1, 1}), 1.0);
  b.Add(Path({1, 0}), 1.0);
  const TrajectoryEnsemble q = TrajectoryEnsemble::Mix(a, b, 1.0 - 1e-12);
  ASSERT_EQ(q.size(), 1u);
  EXPECT_EQ(q.members()[0].weight, 1.0);
  EXPECT_THROW(TrajectoryEnsemble::Mix(a, b, 0.0), PreconditionError);
}

TEST(MeasuresTest, UniformDoubleRange) {
  EXPECT_EQ(UniformDouble(0), 0.0);
  EXPECT_LT(UniformDouble(~0ULL), 1.0);
}

}  // namespace
}  // namespace exitmfg
