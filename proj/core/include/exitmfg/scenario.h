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

#ifndef EXITMFG_SCENARIO_H_
#define EXITMFG_SCENARIO_H_

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "exitmfg/asymptotics.h"
#include "exitmfg/congestion.h"
#include "exitmfg/domain.h"
#include "exitmfg/equilibrium.h"
#include "exitmfg/measures.h"

namespace exitmfg {

inline constexpr int kScenarioSchema = 1;

struct DomainSpec {
  // "interval", "grid2d" or "graph".
  std::string backend = "interval";
  std::vector<double> lo;
  std::vector<double> hi;
  double dx = 0.0;
  int connectivity = 4;
  // Coordinate boxes [lo, hi] (interval) or [x0, x1, y0, y1] (grid2d).
  std::vector<std::vector<double>> target_boxes;
  std::vector<double> origin;
  // Graph backend.
  std::vector<Coords> nodes;
  std::vector<GraphEdge> edges;
  GraphMetric metric = GraphMetric::kShortestPath;
  std::vector<NodeId> targets;
  NodeId origin_node = 0;
  // Reported radius of the truncated grid; 0 when X is not truncated.
  double truncation_radius = 0.0;
};

struct ExitCostSpec {
  double constant = 0.0;
  // (coordinates, value) rows; empty means the constant applies.
  std::vector<std::pair<std::vector<double>, double>> table;
  // Negative means "tightest constant".
  double lipschitz = -1.0;
};

struct KernelSpec {
  Kappa kappa;
  Chi chi;
  Eta eta;
  bool binned = false;
};

struct InitialSpec {
  // "dirac", "uniform", "power_tail", "exp_tail" or "atoms".
  std::string kind = "dirac";
  std::vector<double> at;
  std::vector<double> lo;
  std::vector<double> hi;
  double r0 = 1.0;
  double beta = 4.0;
  double gamma0 = 1.0;
  // Rows of coordinates followed by a weight.
  std::vector<std::vector<double>> atoms;
  int particles = 1;
  SamplingMode sampling = SamplingMode::kQuantile;
};

struct AsymptoticsSpec {
  int p = 1;
  // Explicit report times; when empty, every `report_every` grid samples.
  std::vector<double> report_times;
  int report_every = 1;
  // "none", "power" or "exp".
  std::string rate_fit = "none";
  double fit_lo = 0.0;
  double fit_hi = 0.0;
  int dimension = 1;
};

struct StabilitySpec {
  // Dotted path of the scenario value that is varied, e.g. "initial.at".
  std::string path;
  // Value at the base point of the family; defaults to the scenario's own.
  std::optional<double> base;
  std::vector<double> values;
};

struct Scenario {
  std::string name;
  std::string description;
  DomainSpec domain;
  ExitCostSpec exit_cost;
  KernelSpec kernel;
  InitialSpec initial;
  EquilibriumConfig equilibrium;
  AsymptoticsSpec asymptotics;
  std::optional<StabilitySpec> stability;
  std::string output;
  std::uint64_t seed = 0;
  // Canonical JSON of the scenario (sorted keys, two-space indent).
  std::string canonical_json;
};

// Parses and validates a scenario document. Throws ScenarioError naming the
// offending key on unknown keys, wrong types or missing blocks.
Scenario ParseScenario(const std::string& json_text);

// Registry of built-in scenarios.
std::vector<std::string> RegistryNames();
bool IsRegistryName(const std::string& name);
// JSON text of a registry entry; throws ScenarioError for unknown names.
std::string RegistryScenarioJson(const std::string& name);

// Loads a registry name or a path to a JSON file.
std::string LoadScenarioText(const std::string& name_or_path);

// Sets the value at a dotted path. `value` is parsed as JSON when possible and
// as a string otherwise; a scalar assigned to an array slot is wrapped.
std::string ApplyOverride(const std::string& json_text,
                          const std::string& path, const std::string& value);

// Materialized game objects. Members reference each other, so the struct is
// neither copyable nor movable; build it in place.
class GameSetup {
 public:
  explicit GameSetup(const Scenario& scenario);
  GameSetup(const GameSetup&) = delete;
  GameSetup& operator=(const GameSetup&) = delete;

  const SpatialDomain& domain() const { return domain_; }
  const ExitCost& cost() const { return cost_; }
  const CongestionKernel& kernel() const { return kernel_; }
  const ParticleMeasure& m0() const { return m0_; }
  Game game() const { return Game{domain_, cost_, kernel_}; }

 private:
  SpatialDomain domain_;
  ExitCost cost_;
  CongestionKernel kernel_;
  ParticleMeasure m0_;
};

SpatialDomain BuildDomain(const DomainSpec& spec);
ExitCost BuildExitCost(const SpatialDomain& domain, const ExitCostSpec& spec);
CongestionKernel BuildKernel(const KernelSpec& spec);
ParticleMeasure BuildInitialMeasure(const SpatialDomain& domain,
                                    const InitialSpec& spec,
                                    std::uint64_t seed);

// Quantile functions of the tail laws on [r0, r_max], as distances from the
// origin: density proportional to r^-beta, and to exp(-gamma0 r).
double PowerTailQuantile(double u, double r0, double beta, double r_max);
double ExpTailQuantile(double u, double r0, double gamma0, double r_max);

}  // namespace exitmfg

#endif  // EXITMFG_SCENARIO_H_
