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

#include "exitmfg/runner.h"

#include <chrono>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "exitmfg/errors.h"
#include "exitmfg/scenario.h"
#include "gtest/gtest.h"

namespace exitmfg {
namespace {

namespace fs = std::filesystem;

class RunnerTest : public ::testing::Test {
 protected:
  void SetUp() override {
    const auto* info = ::testing::UnitTest::GetInstance()->current_test_info();
    root_ = fs::temp_directory_path() /
            (std::string("exitmfg_runner_") + info->name() + "_" +
             std::to_string(
                 std::chrono::steady_clock::now().time_since_epoch().count()));
    fs::create_directories(root_);
  }
  void TearDown() override { fs::remove_all(root_); }

  std::string Dir(const std::string& name) const {
    return (root_ / name).string();
  }

  static std::string Slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
  }

  fs::path root_;
};

TEST_F(RunnerTest, RunWritesArtifactsAndVerifies) {
  const RunOutcome r =
      RunScenario(RegistryScenarioJson("remark_5_3"), Dir("run"));
  ASSERT_EQ(r.exit_code, kExitOk) << r.message;
  for (const char* f :
       {"report.json", "ledger.json", "manifest.json", "scenario.json",
        "trajectories.csv", "marginals.csv", "value_field.csv",
        "exploitability_history.csv", "convergence_curve.csv"}) {
    EXPECT_TRUE(fs::exists(root_ / "run" / f)) << f;
  }
  const VerifyOutcome v = VerifyRun(Dir("run"), {});
  EXPECT_TRUE(v.passed);
  EXPECT_EQ(v.exit_code, kExitOk);
  EXPECT_TRUE(v.differences.empty());
}

TEST_F(RunnerTest, VerifyNamesATruncatedFile) {
  ASSERT_EQ(RunScenario(RegistryScenarioJson("remark_5_3"), Dir("run"))
                .exit_code,
            kExitOk);
  const fs::path csv = root_ / "run" / "trajectories.csv";
  const std::string text = Slurp(csv);
  std::ofstream(csv, std::ios::binary | std::ios::trunc)
      << text.substr(0, text.size() / 2);
  const VerifyOutcome v = VerifyRun(Dir("run"), {});
  EXPECT_FALSE(v.passed);
  EXPECT_EQ(v.exit_code, kExitVerifyMismatch);
  ASSERT_FALSE(v.differences.empty());
  EXPECT_NE(v.differences[0].find("trajectories.csv"), std::string::npos);
}

TEST_F(RunnerTest, VerifyUnderAnotherTolListsDifferences) {
  ASSERT_EQ(RunScenario(RegistryScenarioJson("remark_5_3"), Dir("run"))
                .exit_code,
            kExitOk);
  RunOverrides o;
  o.tol = 1e-6;
  const VerifyOutcome v = VerifyRun(Dir("run"), o);
  EXPECT_FALSE(v.differences.empty());
}

TEST_F(RunnerTest, ValidationFailureExitsWithTwo) {
  const std::string bad =
      ApplyOverride(RegistryScenarioJson("remark_5_3"), "kernel.extra", "1");
  EXPECT_EQ(RunScenario(bad, Dir("bad")).exit_code, kExitValidation);
  EXPECT_EQ(RunScenario("[]", Dir("bad2")).exit_code, kExitValidation);
}

TEST_F(RunnerTest, NonConvergenceExitsWithThree) {
  std::string text = RegistryScenarioJson("congested_corridor");
  text = ApplyOverride(text, "equilibrium.max_iterations", "1");
  EXPECT_EQ(RunScenario(text, Dir("short")).exit_code, kExitNonConvergence);
}

TEST_F(RunnerTest, RepeatedRunsAreByteIdentical) {
  const std::string text = RegistryScenarioJson("remark_5_13");
  ASSERT_EQ(RunScenario(text, Dir("a")).exit_code, kExitOk);
  ASSERT_EQ(RunScenario(text, Dir("b")).exit_code, kExitOk);
  for (const auto& entry : fs::directory_iterator(root_ / "a")) {
    if (entry.path().extension() != ".csv") continue;
    EXPECT_EQ(Slurp(entry.path()),
              Slurp(root_ / "b" / entry.path().filename()))
        << entry.path().filename();
  }
}

TEST_F(RunnerTest, SweepParameters) {
  const SweepParameter p = ParseSweepParameter("initial.at=0.2,[0.3],0.8");
  EXPECT_EQ(p.path, "initial.at");
  ASSERT_EQ(p.values.size(), 3u);
  EXPECT_EQ(p.values[1], "[0.3]");
  EXPECT_THROW(ParseSweepParameter("novalue"), ScenarioError);

  const RunOutcome r = RunSweep(RegistryScenarioJson("remark_5_13"),
                                {ParseSweepParameter("initial.at=0.2,0.8")},
                                Dir("sweep"));
  EXPECT_EQ(r.exit_code, kExitOk);
  EXPECT_TRUE(fs::exists(root_ / "sweep" / "member_000" / "report.json"));
  EXPECT_TRUE(fs::exists(root_ / "sweep" / "member_001" / "report.json"));
  EXPECT_TRUE(fs::exists(root_ / "sweep" / "sweep_report.json"));
}

TEST_F(RunnerTest, EmptySweepSucceeds) {
  const RunOutcome r = RunSweep(RegistryScenarioJson("remark_5_13"),
                                {SweepParameter{"initial.at", {}}},
                                Dir("empty"));
  EXPECT_EQ(r.exit_code, kExitOk);
  EXPECT_TRUE(fs::exists(root_ / "empty" / "sweep_report.json"));
}

TEST_F(RunnerTest, OverridesRewriteTheScenario) {
  RunOverrides o;
  o.seed = 9;
  o.max_iterations = 3;
  const Scenario s =
      ParseScenario(ApplyRunOverrides(RegistryScenarioJson("remark_5_3"), o));
  EXPECT_EQ(s.seed, 9u);
  EXPECT_EQ(s.equilibrium.max_iterations, 3);
}

}  // namespace
}  // namespace exitmfg
