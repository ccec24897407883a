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

#ifndef EXITMFG_RUNNER_H_
#define EXITMFG_RUNNER_H_

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "exitmfg/asymptotics.h"
#include "exitmfg/equilibrium.h"
#include "exitmfg/hypotheses.h"
#include "exitmfg/scenario.h"

namespace exitmfg {

// Process exit statuses of the command line tool.
inline constexpr int kExitOk = 0;
inline constexpr int kExitVerifyMismatch = 1;
inline constexpr int kExitValidation = 2;
inline constexpr int kExitNonConvergence = 3;
inline constexpr int kExitInternal = 4;

// Environment variable naming the root directory for run output.
inline constexpr const char* kOutputRootEnv = "EXITMFG_OUTPUT_ROOT";

// $EXITMFG_OUTPUT_ROOT, or "runs" when unset.
std::string OutputRoot();

struct RunOverrides {
  std::optional<std::uint64_t> seed;
  std::optional<double> tol;
  std::optional<int> max_iterations;
};

// Rewrites the scenario text with the overrides applied.
std::string ApplyRunOverrides(const std::string& scenario_text,
                              const RunOverrides& overrides);

// Asymptotic diagnostics derived from a solved equilibrium.
struct Analysis {
  std::vector<int> report_indices;
  std::optional<ConvergenceCurve> curve;
  std::string curve_error;
  BoundConstants constants;
  std::optional<double> settling_time;
  std::optional<RateFit> rate_fit;
  std::string rate_fit_error;
  // Equilibrium ledger followed by the asymptotic checks.
  CheckLedger ledger;
};

Analysis Analyze(const Scenario& scenario, const GameSetup& setup,
                 const EquilibriumReport& report);

struct RunOutcome {
  int exit_code = kExitOk;
  std::string directory;
  std::string message;
};

// validate, solve, certify, analyse and persist into `directory`.
RunOutcome RunScenario(const std::string& scenario_text,
                       const std::string& directory);

struct VerifyOutcome {
  bool passed = false;
  int exit_code = kExitOk;
  std::vector<std::string> differences;
};

// Re-checks digests and recomputes the ledger from the persisted
// trajectories. A tol override re-evaluates the ledger under the new tol and
// lists what changed.
VerifyOutcome VerifyRun(const std::string& directory,
                        const RunOverrides& overrides);

struct SweepParameter {
  std::string path;
  std::vector<std::string> values;
};

// Splits "path=v1,v2,..." into a SweepParameter.
SweepParameter ParseSweepParameter(const std::string& spec);

// One run per point of the Cartesian product of the parameter values, in
// member_NNN subdirectories, plus sweep_report.json.
RunOutcome RunSweep(const std::string& template_text,
                    const std::vector<SweepParameter>& parameters,
                    const std::string& directory);

}  // namespace exitmfg

#endif  // EXITMFG_RUNNER_H_
