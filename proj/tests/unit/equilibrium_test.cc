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

#include "exitmfg/equilibrium.h"

#include <cmath>
#include <string>

#include "exitmfg/errors.h"
#include "exitmfg/scenario.h"
#include "gtest/gtest.h"

namespace exitmfg {
namespace {

Scenario Registry(const std::string& name) {
  return ParseScenario(RegistryScenarioJson(name));
}

TEST(EquilibriumTest, DampingWeights) {
  EquilibriumConfig c;
  EXPECT_DOUBLE_EQ(DampingWeight(c, 1), 0.5);
  EXPECT_DOUBLE_EQ(DampingWeight(c, 3), 0.25);
  c.damping = DampingRule::kConstant;
  c.lambda = 0.3;
  EXPECT_DOUBLE_EQ(DampingWeight(c, 7), 0.3);
}

TEST(EquilibriumTest, CertifyFlags) {
  ExploitabilityReport r;
  r.epsilon = 0.01;
  r.max_gap = 0.015;
  EXPECT_TRUE(Certify(r, 0.02).weak);
  EXPECT_TRUE(Certify(r, 0.02).strong);
  r.max_gap = 0.5;
  EXPECT_TRUE(Certify(r, 0.02).weak);
  EXPECT_FALSE(Certify(r, 0.02).strong);
  r.epsilon = 0.03;
  EXPECT_FALSE(Certify(r, 0.02).weak);
}

TEST(EquilibriumTest, MidpointCorridor) {
  const Scenario s = Registry("remark_5_3");
  GameSetup setup(s);
  const EquilibriumReport r =
      SolveEquilibrium(setup.game(), setup.m0(), s.equilibrium);
  EXPECT_TRUE(r.converged);
  EXPECT_LT(r.exploitability.epsilon, 0.02);
  EXPECT_EQ(r.certification.weak, r.certification.strong);
  const NodeId mid = setup.domain().NearestNode({0.5, 0.0});
  EXPECT_NEAR(r.fields.phi.at(0, mid), 0.5, 2 * setup.domain().resolution());
  ASSERT_FALSE(r.m_infinity.empty());
  double mass = 0.0;
  for (const Atom& a : r.m_infinity.atoms()) {
    EXPECT_TRUE(setup.domain().IsTarget(a.location.node));
    mass += a.weight;
  }
  EXPECT_EQ(mass, 1.0);
  EXPECT_TRUE(r.ledger.AllPassed()) << r.ledger.Summary();
}

TEST(EquilibriumTest, BestResponseStartsFromEveryAtom) {
  const Scenario s = Registry("power_tail_cor56a");
  GameSetup setup(s);
  const TrajectoryEnsemble q = BestResponse(
      setup.game(), setup.m0(),
      StaticEnsemble(setup.m0(),
                     RunTimeGrid(setup.game(), setup.m0(), s.equilibrium)));
  EXPECT_TRUE(q.InitialMarginal() == setup.m0());
  for (const auto& m : q.members()) {
    ASSERT_TRUE(m.trajectory.exit_index.has_value());
  }
}

TEST(EquilibriumTest, CongestedCorridorCertifies) {
  const Scenario s = Registry("congested_corridor");
  GameSetup setup(s);
  const EquilibriumReport r =
      SolveEquilibrium(setup.game(), setup.m0(), s.equilibrium);
  EXPECT_TRUE(r.converged);
  EXPECT_TRUE(r.certification.weak);
  EXPECT_TRUE(r.certification.strong);
  EXPECT_TRUE(r.ledger.AllPassed()) << r.ledger.Summary();
}

TEST(EquilibriumTest, InvalidConfigIsRejected) {
  EquilibriumConfig c;
  c.tol = -1.0;
  EXPECT_THROW(c.Validate(), PreconditionError);
  c = EquilibriumConfig();
  c.damping = DampingRule::kConstant;
  c.lambda = 1.5;
  EXPECT_THROW(c.Validate(), PreconditionError);
}

}  // namespace
}  // namespace exitmfg
