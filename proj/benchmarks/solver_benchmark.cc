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

#include <random>
#include <vector>

#include "benchmark/benchmark.h"
#include "exitmfg/equilibrium.h"
#include "exitmfg/measures.h"
#include "exitmfg/ocp.h"
#include "exitmfg/scenario.h"
#include "exitmfg/wasserstein.h"

namespace exitmfg {
namespace {

const GameSetup& Corridor() {
  static const GameSetup* setup =
      new GameSetup(ParseScenario(RegistryScenarioJson("congested_corridor")));
  return *setup;
}

void BM_SolveValue(benchmark::State& state) {
  const GameSetup& s = Corridor();
  EquilibriumConfig config;
  config.dt = 1.0 / static_cast<double>(state.range(0));
  const TimeGrid grid = RunTimeGrid(s.game(), s.m0(), config);
  const SpeedField speed = SpeedField::Constant(
      grid, s.domain().node_count(), s.kernel().k_max());
  for (auto _ : state) {
    benchmark::DoNotOptimize(SolveValue(s.domain(), s.cost(), speed));
  }
  state.counters["steps"] = grid.steps;
}
BENCHMARK(BM_SolveValue)->Arg(100)->Arg(200)->Arg(400)
    ->Unit(benchmark::kMillisecond);

void BM_Wasserstein(benchmark::State& state) {
  const SpatialDomain d = SpatialDomain::Interval(
      0.0, 1.0, 0.001, [](const Coords& c) { return c[0] <= 0.0; }, 0.0);
  std::mt19937_64 rng(7);
  std::uniform_int_distribution<NodeId> node(0, 1000);
  auto draw = [&]() {
    std::vector<Atom> atoms;
    for (int i = 0; i < state.range(0); ++i) {
      atoms.push_back({Point::At(node(rng)), 1.0});
    }
    return ParticleMeasure(atoms).Normalized();
  };
  const ParticleMeasure a = draw(), b = draw();
  for (auto _ : state) {
    benchmark::DoNotOptimize(Wasserstein(d, a, b, 2));
  }
}
BENCHMARK(BM_Wasserstein)->Range(16, 4096);

void BM_InducedSpeedField(benchmark::State& state) {
  const GameSetup& s = Corridor();
  const EquilibriumConfig config;
  const TimeGrid grid = RunTimeGrid(s.game(), s.m0(), config);
  const SpeedField speed = SpeedField::Constant(
      grid, s.domain().node_count(), s.kernel().k_max());
  const Fields fields{speed, SolveValue(s.domain(), s.cost(), speed)};
  const TrajectoryEnsemble q =
      BestResponseWithFields(s.game(), s.m0(), fields);
  const bool binned = state.range(0) != 0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(InducedSpeedField(s.game(), q, binned));
  }
}
BENCHMARK(BM_InducedSpeedField)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

}  // namespace
}  // namespace exitmfg

BENCHMARK_MAIN();
