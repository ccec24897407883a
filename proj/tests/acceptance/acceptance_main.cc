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

// Acceptance checks. Prints one PASS or FAIL line per criterion and exits
// nonzero when any criterion fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <memory>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "exitmfg/asymptotics.h"
#include "exitmfg/domain.h"
#include "exitmfg/equilibrium.h"
#include "exitmfg/errors.h"
#include "exitmfg/measures.h"
#include "exitmfg/ocp.h"
#include "exitmfg/runner.h"
#include "exitmfg/scenario.h"
#include "exitmfg/wasserstein.h"
#include "support/oracles.h"

namespace exitmfg {
namespace {

namespace fs = std::filesystem;
using Clock = std::chrono::steady_clock;

struct Verdict {
  bool passed = true;
  std::string detail;
};

std::string Fmt(const char* format, double a, double b = 0.0,
                double c = 0.0) {
  char buf[256];
  std::snprintf(buf, sizeof(buf), format, a, b, c);
  return buf;
}

double Seconds(Clock::time_point since) {
  return std::chrono::duration<double>(Clock::now() - since).count();
}

struct Solved {
  Scenario scenario;
  std::unique_ptr<GameSetup> setup;
  EquilibriumReport report;
  Analysis analysis;
};

std::vector<const Solved*> g_certified;

std::unique_ptr<Solved> Solve(const std::string& text) {
  auto s = std::make_unique<Solved>();
  s->scenario = ParseScenario(text);
  s->setup = std::make_unique<GameSetup>(s->scenario);
  s->report = SolveEquilibrium(s->setup->game(), s->setup->m0(),
                               s->scenario.equilibrium);
  s->analysis = Analyze(s->scenario, *s->setup, s->report);
  return s;
}

// Keeps every solve alive for the weak/strong audit.
std::vector<std::unique_ptr<Solved>> g_solves;

const Solved& Keep(std::unique_ptr<Solved> s) {
  if (s->report.converged && s->report.certification.weak) {
    g_certified.push_back(s.get());
  }
  g_solves.push_back(std::move(s));
  return *g_solves.back();
}

Verdict MidpointOracle() {
  const auto start = Clock::now();
  const Solved& s = Keep(Solve(RegistryScenarioJson("remark_5_3")));
  const double runtime = Seconds(start);
  const SpatialDomain& d = s.setup->domain();
  const double dx = d.resolution();
  const double eps = s.report.exploitability.epsilon;
  const double phi = s.report.fields.phi.at(0, d.NearestNode({0.5, 0.0}));
  double mass = 0.0;
  bool in_exits = !s.report.m_infinity.empty();
  for (const Atom& a : s.report.m_infinity.atoms()) {
    mass += a.weight;
    const double x = d.coordinates(a.location)[0];
    in_exits = in_exits && a.location.AtNode() && (x == 0.0 || x == 1.0);
  }
  Verdict v;
  v.passed = s.report.converged && eps < 0.02 &&
             std::abs(phi - 0.5) <= 2 * dx && in_exits && mass == 1.0 &&
             runtime < 10.0;
  v.detail = Fmt("epsilon %.3g, phi(0, 0.5) %.6g, runtime %.2fs", eps, phi,
                 runtime) +
             (in_exits ? ", limit on {0, 1}" : ", limit off the exits") +
             (mass == 1.0 ? " with unit mass" : " without unit mass");
  return v;
}

Verdict LimitCaseTable() {
  const auto start = Clock::now();
  Verdict v;
  for (double a : {0.1, 0.3, 0.45, 0.55, 0.7, 0.9}) {
    const std::string text = ApplyOverride(RegistryScenarioJson("remark_5_13"),
                                           "initial.at", Fmt("%.17g", a));
    const Solved& s = Keep(Solve(text));
    const SpatialDomain& d = s.setup->domain();
    const NodeId exit = d.NearestNode({a < 0.5 ? 0.0 : 1.0, 0.0});
    double w1 = INFINITY;
    if (!s.report.m_infinity.empty()) {
      w1 = Wasserstein(d, s.report.m_infinity,
                       ParticleMeasure::Dirac(Point::At(exit)), 1);
    }
    const bool ok = w1 <= 2 * d.resolution();
    v.passed = v.passed && ok;
    v.detail += Fmt("a=%.2g W1=%.3g; ", a, w1);
  }
  const double runtime = Seconds(start);
  v.passed = v.passed && runtime < 60.0;
  v.detail += Fmt("runtime %.2fs", runtime);
  return v;
}

Verdict Settling() {
  std::string text = RegistryScenarioJson("remark_5_3");
  text = ApplyOverride(text, "name", "\"settling_uniform\"");
  text = ApplyOverride(text, "domain.targets", "[[0, 0]]");
  text = ApplyOverride(text, "initial",
                       R"({"kind": "uniform", "lo": 0.8, "hi": 1.0,
                           "particles": 40, "sampling": "quantile"})");
  const Solved& s = Keep(Solve(text));
  const TimeGrid& grid = s.report.grid;
  Verdict v;
  if (!s.analysis.settling_time.has_value()) {
    v.passed = false;
    v.detail = "no settling time";
    return v;
  }
  const double ts = *s.analysis.settling_time;
  std::vector<double> times;
  for (int j = grid.IndexOf(ts); j <= grid.steps; ++j) {
    times.push_back(grid.TimeAt(j));
  }
  const ConvergenceCurve c = ComputeConvergenceCurve(
      s.setup->domain(), s.report.ensemble, times, 1);
  const double worst = *std::max_element(c.values.begin(), c.values.end());
  v.passed = s.report.converged && std::abs(ts - 1.0) <= 2 * grid.dt &&
             worst == 0.0;
  v.detail = Fmt("settling time %.6g (dt %.3g), max W1 after it %.3g", ts,
                 grid.dt, worst);
  return v;
}

Verdict TailBoundCurve() {
  const Solved& s = Keep(Solve(RegistryScenarioJson("congested_corridor")));
  Verdict v;
  if (!s.analysis.curve.has_value()) {
    v.passed = false;
    v.detail = "no convergence curve: " + s.analysis.curve_error;
    return v;
  }
  const ConvergenceCurve& c = *s.analysis.curve;
  const double slack =
      4.0 * (s.setup->domain().resolution() + s.report.grid.dt);
  int checked = 0, violations = 0;
  for (std::size_t i = 0; i < c.times.size(); ++i) {
    if (!std::isfinite(c.bounds[i])) continue;
    ++checked;
    if (c.values[i] > c.bounds[i] + slack) ++violations;
  }
  v.passed = s.report.converged && s.setup->m0().size() > 0 && checked > 0 &&
             violations == 0;
  v.detail = Fmt("%.0f samples past t0, %.0f violations", checked, violations);
  return v;
}

Verdict PowerTail() {
  const auto start = Clock::now();
  const Solved& s = Keep(Solve(RegistryScenarioJson("power_tail_cor56a")));
  const double runtime = Seconds(start);
  Verdict v;
  if (!s.analysis.rate_fit.has_value() || !s.analysis.curve.has_value()) {
    v.passed = false;
    v.detail = "missing fit: " + s.analysis.rate_fit_error;
    return v;
  }
  const ConvergenceCurve& c = *s.analysis.curve;
  const SpatialDomain& d = s.setup->domain();
  double worst = 0.0;
  for (std::size_t i = 0; i < c.times.size(); ++i) {
    const double oracle =
        testing::HalfLineDistanceToOrigin(d, s.setup->m0(), c.times[i]);
    worst = std::max(worst, std::abs(c.values[i] - oracle));
  }
  const double exponent = s.analysis.rate_fit->exponent;
  v.passed = exponent <= -2.0 + 0.3 && worst <= 3 * d.resolution() &&
             runtime < 30.0;
  v.detail = Fmt("exponent %.4g, max deviation from pushforward %.3g, ",
                 exponent, worst) +
             Fmt("runtime %.2fs", runtime);
  return v;
}

Verdict ExpTail() {
  const Solved& s = Keep(Solve(RegistryScenarioJson("exp_tail_cor56b")));
  Verdict v;
  if (!s.analysis.rate_fit.has_value()) {
    v.passed = false;
    v.detail = "missing fit: " + s.analysis.rate_fit_error;
    return v;
  }
  const double alpha = s.setup->kernel().k_min() /
                       s.setup->domain().geodesic_constant();
  const double need = 0.85 * s.scenario.initial.gamma0 * alpha;
  const double rate = s.analysis.rate_fit->rate;
  v.passed = rate >= need;
  v.detail = Fmt("rate %.4g against %.4g", rate, need);
  return v;
}

Verdict OcpSuite() {
  const double k_min = 0.5, k_max = 1.5;
  const SpatialDomain d = SpatialDomain::Interval(
      0.0, 1.0, 0.02, [](const Coords& c) { return c[0] <= 0.0 || c[0] >= 1.0; },
      0.0);
  const NodeId last = static_cast<NodeId>(d.node_count()) - 1;
  std::mt19937_64 rng(2026);
  std::uniform_real_distribution<double> gdist(0.0, 0.6);
  std::uniform_int_distribution<int> step(-1, 1);
  std::uniform_int_distribution<NodeId> start(1, last - 1);
  double worst_cost = 0.0, worst_dpp = 0.0, worst_mono = 0.0;
  int walks = 0;
  double tol = 0.0;
  for (int field = 0; field < 50; ++field) {
    const ExitCost g =
        ExitCost::FromTable(d, {{0, gdist(rng)}, {last, gdist(rng)}});
    const TimeGrid grid = DefaultTimeGrid(d, k_max, 3.0);
    tol = 4.0 * (grid.dt + d.resolution());
    const SpeedField k =
        testing::RandomSpeedField(d, grid, k_min, k_max, 1000 + field);
    const ValueField phi = SolveValue(d, g, k);
    for (NodeId x = 0; x <= last; ++x) {
      const Trajectory t = SynthesizeOptimal(d, g, phi, k, 0, Point::At(x));
      const double gap = std::abs(RealizedCost(d, t, grid, g) - phi.at(0, x));
      worst_cost = std::max(worst_cost, gap);
    }
    // Nearest-neighbour walks are admissible when dt k_min covers a cell.
    TimeGrid coarse;
    coarse.dt = d.resolution() / k_min;
    coarse.steps = static_cast<int>(std::ceil(3.0 / coarse.dt));
    const SpeedField kc =
        testing::RandomSpeedField(d, coarse, k_min, k_max, 5000 + field);
    const ValueField pc = SolveValue(d, g, kc);
    for (int w = 0; w < 10; ++w, ++walks) {
      Trajectory t;
      NodeId x = start(rng);
      t.samples.push_back(Point::At(x));
      for (int j = 0; j < coarse.steps; ++j) {
        if (!d.IsTarget(x)) x = std::clamp<NodeId>(x + step(rng), 0, last);
        t.samples.push_back(Point::At(x));
      }
      if (!IsAdmissible(d, t, kc, 0.0).admissible) return {false, "bad walk"};
      for (int j = 0; j < coarse.steps; ++j) {
        const NodeId a = t.samples[j].node;
        if (d.IsTarget(a)) break;
        for (int h = j + 1; h <= coarse.steps; ++h) {
          const double r = pc.at(h, t.samples[h].node) +
                           (h - j) * coarse.dt - pc.at(j, a);
          worst_dpp = std::min(worst_dpp, r);
          if (d.IsTarget(t.samples[h].node)) break;
        }
      }
    }
  }
  std::uniform_real_distribution<double> boost(1.0, 2.0);
  // Cost spread for the doubled speed range.
  std::uniform_real_distribution<double> gnarrow(0.0, 0.3);
  for (int pair = 0; pair < 10; ++pair) {
    const ExitCost g =
        ExitCost::FromTable(d, {{0, gnarrow(rng)}, {last, gnarrow(rng)}});
    const TimeGrid grid = DefaultTimeGrid(d, 2 * k_max, 3.0);
    const SpeedField slow =
        testing::RandomSpeedField(d, grid, k_min, k_max, 9000 + pair);
    SpeedField fast(grid, d.node_count(), k_min, 2 * k_max);
    for (int j = 0; j <= grid.steps; ++j) {
      for (NodeId x = 0; x <= last; ++x) {
        fast.at(j, x) = slow.at(j, x) * boost(rng);
      }
    }
    const ValueField a = SolveValue(d, g, slow);
    const ValueField b = SolveValue(d, g, fast);
    for (int j = 0; j <= grid.steps; ++j) {
      for (NodeId x = 0; x <= last; ++x) {
        worst_mono = std::min(worst_mono, a.at(j, x) - b.at(j, x));
      }
    }
  }
  Verdict v;
  v.passed = worst_cost <= tol && worst_dpp >= -1e-9 && walks == 500 &&
             worst_mono >= -1e-9;
  v.detail = Fmt("max |cost - phi| %.3g (tol %.3g), min DPP residual %.3g, ",
                 worst_cost, tol, worst_dpp) +
             Fmt("min phi - phi' %.3g", worst_mono);
  return v;
}

// T(R) and psi(R) written out from their formulas.
double HorizonOracle(const SpatialDomain& d, const ExitCost& g, double k_min,
                     double r) {
  NodeId y0 = kNoNode;
  double best = INFINITY;
  for (NodeId y : d.targets()) {
    const double dist = d.Distance(d.origin(), y);
    if (dist < best || (dist == best && y < y0)) {
      best = dist;
      y0 = y;
    }
  }
  const double D = d.geodesic_constant();
  return g(y0) + D * best / k_min + D * r / k_min;
}

Verdict BoundsLedger() {
  Verdict v;
  int violations = 0;
  for (const std::string& name : RegistryNames()) {
    const Solved& s = Keep(Solve(RegistryScenarioJson(name)));
    const SpatialDomain& d = s.setup->domain();
    const ExitCost& g = s.setup->cost();
    const double k_min = s.setup->kernel().k_min();
    const double k_max = s.setup->kernel().k_max();
    const double max_g = g.MaxValue(d);
    const ValueField& phi = s.report.fields.phi;
    for (NodeId x = 0; x < static_cast<NodeId>(d.node_count()); ++x) {
      const double bound =
          HorizonOracle(d, g, k_min, d.Distance(d.origin(), x)) + max_g;
      for (int j = 0; j <= phi.grid().steps; ++j) {
        if (phi.at(j, x) > bound + 1e-9) ++violations;
      }
    }
    double radius = 0.0;
    for (const Atom& a : s.setup->m0().atoms()) {
      radius = std::max(radius, d.Distance(Point::At(d.origin()), a.location));
    }
    const double psi = k_max * HorizonOracle(d, g, k_min, radius) + radius;
    for (const auto& m : s.report.ensemble.members()) {
      for (const Point& p : m.trajectory.samples) {
        if (d.Distance(Point::At(d.origin()), p) > psi + 1e-9) ++violations;
      }
    }
    v.detail += name + " ok; ";
  }
  v.passed = violations == 0;
  v.detail += Fmt("%.0f violations", violations);
  return v;
}

Verdict MeasuresSuite() {
  const SpatialDomain d = SpatialDomain::Interval(
      0.0, 1.0, 0.01, [](const Coords& c) { return c[0] <= 0.0; }, 0.0);
  std::mt19937_64 rng(99);
  std::uniform_int_distribution<int> count(1, 16);
  std::uniform_int_distribution<NodeId> node(0, 99);
  std::uniform_real_distribution<double> unit(0.05, 1.0);
  auto random_measure = [&]() {
    std::vector<Atom> atoms;
    const int n = count(rng);
    for (int i = 0; i < n; ++i) {
      const NodeId a = node(rng);
      const Point p = i % 2 ? d.Canonical({a, a + 1, 0.01 * unit(rng)})
                            : Point::At(a);
      atoms.push_back({p, unit(rng)});
    }
    return ParticleMeasure(atoms).Normalized();
  };
  double worst_lp = 0.0;
  for (int i = 0; i < 100; ++i) {
    const ParticleMeasure a = random_measure(), b = random_measure();
    for (int p : {1, 2}) {
      worst_lp = std::max(worst_lp,
                          std::abs(WassersteinQuantile1d(d, a, b, p) -
                                   testing::LpWasserstein(d, a, b, p)));
    }
  }
  int axiom_failures = 0;
  for (int i = 0; i < 1000; ++i) {
    const ParticleMeasure a = random_measure(), b = random_measure(),
                          c = random_measure();
    const double ab = Wasserstein(d, a, b, 1);
    if (ab < 0.0 || Wasserstein(d, a, a, 1) > 1e-12 ||
        std::abs(ab - Wasserstein(d, b, a, 1)) > 1e-12 ||
        ab > Wasserstein(d, a, c, 1) + Wasserstein(d, c, b, 1) + 1e-12) {
      ++axiom_failures;
    }
  }
  Verdict v;
  v.passed = worst_lp <= 1e-9 && axiom_failures == 0;
  v.detail = Fmt("max |quantile - LP| %.3g, %.0f axiom failures", worst_lp,
                 axiom_failures);
  return v;
}

Verdict WeakStrong() {
  Verdict v;
  int disagreements = 0;
  for (const Solved* s : g_certified) {
    if (s->report.certification.weak != s->report.certification.strong) {
      ++disagreements;
      v.detail += s->scenario.name + " disagrees; ";
    }
  }
  v.passed = !g_certified.empty() && disagreements == 0;
  v.detail += Fmt("%.0f certified runs, %.0f disagreements",
                  g_certified.size(), disagreements);
  return v;
}

std::string Slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

Verdict Determinism() {
  const fs::path root = fs::temp_directory_path() / "exitmfg_acceptance";
  fs::remove_all(root);
  Verdict v;
  for (const std::string& name : RegistryNames()) {
    const std::string text = RegistryScenarioJson(name);
    const RunOutcome a = RunScenario(text, (root / name / "a").string());
    const RunOutcome b = RunScenario(text, (root / name / "b").string());
    bool same = a.exit_code == b.exit_code;
    for (const auto& e : fs::directory_iterator(root / name / "a")) {
      if (e.path().extension() != ".csv") continue;
      same = same &&
             Slurp(e.path()) == Slurp(root / name / "b" / e.path().filename());
    }
    const bool verified = VerifyRun((root / name / "a").string(), {}).passed &&
                          VerifyRun((root / name / "b").string(), {}).passed;
    v.passed = v.passed && same && verified;
    v.detail += name + (same ? " identical" : " differs") +
                (verified ? ", verified; " : ", verify failed; ");
  }
  fs::remove_all(root);
  return v;
}

}  // namespace
}  // namespace exitmfg

int main() {
  using exitmfg::Verdict;
  struct Criterion {
    int id;
    const char* title;
    std::function<Verdict()> run;
  };
  const std::vector<Criterion> criteria = {
      {1, "midpoint corridor oracle", exitmfg::MidpointOracle},
      {2, "limit case table", exitmfg::LimitCaseTable},
      {3, "finite settling time", exitmfg::Settling},
      {4, "tail bound on the congested corridor", exitmfg::TailBoundCurve},
      {5, "power tail rate", exitmfg::PowerTail},
      {6, "exponential tail rate", exitmfg::ExpTail},
      {7, "optimal control suite", exitmfg::OcpSuite},
      {8, "a priori bounds", exitmfg::BoundsLedger},
      {9, "measures suite", exitmfg::MeasuresSuite},
      {10, "weak and strong agree", exitmfg::WeakStrong},
      {11, "determinism and verify", exitmfg::Determinism},
  };
  int failed = 0;
  for (const Criterion& c : criteria) {
    Verdict v;
    try {
      v = c.run();
    } catch (const std::exception& e) {
      v = {false, std::string("threw: ") + e.what()};
    }
    if (!v.passed) ++failed;
    std::printf("%s criterion %d (%s): %s\n", v.passed ? "PASS" : "FAIL", c.id,
                c.title, v.detail.c_str());
    std::fflush(stdout);
  }
  std::printf("%d of %zu criteria passed\n",
              static_cast<int>(criteria.size()) - failed, criteria.size());
  return failed == 0 ? 0 : 1;
}
