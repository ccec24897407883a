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

#include <cstdint>
#include <filesystem>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "exitmfg/errors.h"
#include "exitmfg/runner.h"
#include "exitmfg/scenario.h"

namespace {

using exitmfg::RunOverrides;

struct Options {
  std::string scenario;
  std::string directory;
  std::string output;
  std::vector<std::string> params;
  std::uint64_t seed = 0;
  double tol = 0.0;
  int max_iterations = 0;
};

void AddOverrides(CLI::App* cmd, Options* opts) {
  cmd->add_option("--seed", opts->seed, "Override the scenario seed");
  cmd->add_option("--tol", opts->tol, "Override the certification tolerance")
      ->check(CLI::PositiveNumber);
  cmd->add_option("--max-iter", opts->max_iterations,
                  "Override the iteration budget")
      ->check(CLI::PositiveNumber);
}

RunOverrides CollectOverrides(const CLI::App& cmd, const Options& opts) {
  RunOverrides o;
  if (cmd.count("--seed") > 0) o.seed = opts.seed;
  if (cmd.count("--tol") > 0) o.tol = opts.tol;
  if (cmd.count("--max-iter") > 0) o.max_iterations = opts.max_iterations;
  return o;
}

std::string DefaultDirectory(const std::string& text,
                             const std::string& suffix) {
  std::string name = "run";
  try {
    name = exitmfg::ParseScenario(text).name;
  } catch (const exitmfg::Error&) {
  }
  return (std::filesystem::path(exitmfg::OutputRoot()) / (name + suffix))
      .string();
}

int DoRun(const CLI::App& cmd, const Options& opts) {
  const std::string text = exitmfg::ApplyRunOverrides(
      exitmfg::LoadScenarioText(opts.scenario), CollectOverrides(cmd, opts));
  const std::string dir =
      opts.output.empty() ? DefaultDirectory(text, "") : opts.output;
  const exitmfg::RunOutcome r = exitmfg::RunScenario(text, dir);
  std::cout << r.directory << ": " << r.message << "\n";
  return r.exit_code;
}

int DoVerify(const CLI::App& cmd, const Options& opts) {
  const exitmfg::VerifyOutcome v =
      exitmfg::VerifyRun(opts.directory, CollectOverrides(cmd, opts));
  for (const std::string& d : v.differences) std::cout << d << "\n";
  std::cout << opts.directory << ": " << (v.passed ? "PASS" : "FAIL") << "\n";
  return v.exit_code;
}

int DoSweep(const CLI::App& cmd, const Options& opts) {
  const std::string text = exitmfg::ApplyRunOverrides(
      exitmfg::LoadScenarioText(opts.scenario), CollectOverrides(cmd, opts));
  std::vector<exitmfg::SweepParameter> params;
  for (const std::string& p : opts.params) {
    params.push_back(exitmfg::ParseSweepParameter(p));
  }
  const std::string dir =
      opts.output.empty() ? DefaultDirectory(text, "_sweep") : opts.output;
  const exitmfg::RunOutcome r = exitmfg::RunSweep(text, params, dir);
  std::cout << r.directory << ": " << r.message << "\n";
  return r.exit_code;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Optimal-exit mean field game solver"};
  app.require_subcommand(1);
  Options opts;

  CLI::App* run = app.add_subcommand("run", "Solve and certify a scenario");
  run->add_option("scenario", opts.scenario,
                  "Scenario JSON file or registry name")
      ->required();
  run->add_option("-o,--output", opts.output,
                  "Run directory (default $EXITMFG_OUTPUT_ROOT/<name>)");
  AddOverrides(run, &opts);

  CLI::App* verify =
      app.add_subcommand("verify", "Re-check a persisted run directory");
  verify->add_option("directory", opts.directory, "Run directory")
      ->required();
  AddOverrides(verify, &opts);

  CLI::App* sweep =
      app.add_subcommand("sweep", "Run a scenario over a parameter grid");
  sweep->add_option("scenario", opts.scenario,
                    "Template scenario JSON file or registry name")
      ->required();
  sweep->add_option("--param", opts.params, "path=v1,v2,... (repeatable)");
  sweep->add_option("-o,--output", opts.output, "Sweep directory");
  AddOverrides(sweep, &opts);

  CLI::App* list =
      app.add_subcommand("list-scenarios", "Print the built-in scenarios");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*run) return DoRun(*run, opts);
    if (*verify) return DoVerify(*verify, opts);
    if (*sweep) return DoSweep(*sweep, opts);
    if (*list) {
      for (const std::string& name : exitmfg::RegistryNames()) {
        std::cout << name << "\n";
      }
      return exitmfg::kExitOk;
    }
  } catch (const exitmfg::ScenarioError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return exitmfg::kExitValidation;
  } catch (const exitmfg::ArtifactError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return exitmfg::kExitVerifyMismatch;
  } catch (const exitmfg::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return exitmfg::kExitInternal;
  }
  return exitmfg::kExitInternal;
}
