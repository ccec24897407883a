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

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <ctime>
#include <filesystem>
#include <map>
#include <utility>

#include <nlohmann/json.hpp>

#include "exitmfg/errors.h"
#include "exitmfg/ocp.h"
#include "exitmfg/report_io.h"
#include "exitmfg/wasserstein.h"

#ifndef EXITMFG_VERSION
#define EXITMFG_VERSION "0.0.0"
#endif

namespace exitmfg {
namespace {

namespace fs = std::filesystem;
using nlohmann::json;
using ordered_json = nlohmann::ordered_json;

constexpr const char* kTopologyNote =
    "convergence of trajectory measures is tracked through W_1 between time "
    "marginals on the report grid";

ordered_json Num(double v) {
  if (std::isfinite(v)) return Round12(v);
  return FormatDouble(v);
}

double FromNum(const json& v) {
  if (v.is_number()) return v.get<double>();
  if (v.is_string()) {
    const std::string s = v.get<std::string>();
    if (s == "inf") return std::numeric_limits<double>::infinity();
    if (s == "-inf") return -std::numeric_limits<double>::infinity();
    if (s == "nan") return std::numeric_limits<double>::quiet_NaN();
  }
  throw ArtifactError("expected a number in a JSON artifact");
}

ordered_json CoordsJson(const SpatialDomain& domain, const Point& p) {
  const Coords c = domain.coordinates(p);
  ordered_json out = ordered_json::array({Num(c[0])});
  if (domain.dimension() == 2) out.push_back(Num(c[1]));
  return out;
}

ordered_json MeasureJson(const SpatialDomain& domain,
                         const ParticleMeasure& mu) {
  ordered_json out = ordered_json::array();
  for (const Atom& a : mu.atoms()) {
    out.push_back({{"at", CoordsJson(domain, a.location)},
                   {"weight", Num(a.weight)}});
  }
  return out;
}

ordered_json LedgerJson(const CheckLedger& ledger) {
  ordered_json checks = ordered_json::array();
  for (const Check& c : ledger.checks()) {
    checks.push_back({{"id", c.id},
                      {"passed", c.passed},
                      {"measured", Num(c.measured)},
                      {"threshold", Num(c.threshold)},
                      {"detail", c.detail}});
  }
  return {{"all_passed", ledger.AllPassed()}, {"checks", checks}};
}

std::string Dump(const ordered_json& j) { return j.dump(2) + "\n"; }

std::string Timestamp() {
  const std::time_t now =
      std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

void EnsureDirectory(const std::string& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw ArtifactError("cannot create directory " + dir);
}

class ArtifactWriter {
 public:
  explicit ArtifactWriter(std::string dir) : dir_(std::move(dir)) {
    EnsureDirectory(dir_);
  }

  void Write(const std::string& name, const std::string& content) {
    WriteTextFile((fs::path(dir_) / name).string(), content);
    files_[name] = {content.size(), HexDigest(Fnv1a64(content))};
  }

  void WriteManifest(const Scenario* scenario, int exit_code) {
    ordered_json files = ordered_json::object();
    for (const auto& [name, info] : files_) {
      files[name] = {{"bytes", info.first}, {"fnv1a64", info.second}};
    }
    ordered_json m = {{"schema", kScenarioSchema},
                      {"tool", "exitmfg"},
                      {"version", EXITMFG_VERSION}};
    if (scenario != nullptr) {
      m["scenario"] = scenario->name;
      m["seed"] = scenario->seed;
      m["config_hash"] = HexDigest(Fnv1a64(scenario->canonical_json));
    }
    m["exit_code"] = exit_code;
    m["timestamp"] = Timestamp();
    m["files"] = files;
    WriteTextFile((fs::path(dir_) / "manifest.json").string(), Dump(m));
  }

 private:
  std::string dir_;
  std::map<std::string, std::pair<std::size_t, std::string>> files_;
};

std::vector<int> ReportIndices(const AsymptoticsSpec& spec,
                               const TimeGrid& grid) {
  std::vector<int> idx;
  if (!spec.report_times.empty()) {
    for (double t : spec.report_times) idx.push_back(grid.IndexOf(t));
  } else {
    for (int j = 0; j <= grid.steps; j += spec.report_every) idx.push_back(j);
    if (idx.back() != grid.steps) idx.push_back(grid.steps);
  }
  std::sort(idx.begin(), idx.end());
  idx.erase(std::unique(idx.begin(), idx.end()), idx.end());
  return idx;
}

std::vector<int> FieldIndices(const TimeGrid& grid) {
  std::vector<int> idx;
  const int every = std::max(1, grid.steps / 20);
  for (int j = 0; j <= grid.steps; j += every) idx.push_back(j);
  if (idx.back() != grid.steps) idx.push_back(grid.steps);
  return idx;
}

ordered_json HypothesesJson(const HypothesisReport& h) {
  return LedgerJson(h)["checks"];
}

HypothesisReport AllHypotheses(const GameSetup& setup) {
  HypothesisReport h = ValidateHypotheses(setup.domain(), setup.cost());
  h.Append(ValidateKernel(setup.kernel(), setup.cost(),
                          setup.domain().resolution()));
  return h;
}

// Fills the derived fields of a report for an ensemble read back from disk.
// Persisted weights and offsets carry 12 digits; when the stored initial
// marginal matches m0 to that precision the exact weights are restored.
TrajectoryEnsemble UndoPrintRounding(const ParticleMeasure& m0,
                                     TrajectoryEnsemble q) {
  const ParticleMeasure start = q.InitialMarginal();
  if (start.size() != m0.size()) return q;
  for (std::size_t i = 0; i < m0.size(); ++i) {
    const Atom& a = start.atoms()[i];
    const Atom& b = m0.atoms()[i];
    if (a.location.node != b.location.node ||
        a.location.next != b.location.next ||
        std::abs(a.location.offset - b.location.offset) > 1e-9 ||
        std::abs(a.weight - b.weight) > 1e-9 * std::max(1e-3, b.weight)) {
      return q;
    }
  }
  try {
    return q.AnchoredTo(m0);
  } catch (const PreconditionError&) {
    return q;
  }
}

EquilibriumReport Reconstruct(const Scenario& scenario, const GameSetup& setup,
                              TrajectoryEnsemble ensemble) {
  const Game game = setup.game();
  const EquilibriumConfig& config = scenario.equilibrium;
  EquilibriumReport r;
  r.grid = ensemble.grid();
  r.ensemble = std::move(ensemble);
  r.tol = config.tol;
  r.tol_dpp = config.tol_dpp.value_or(DefaultTolDpp(r.grid, setup.domain()));
  r.support_radius = SupportRadius(setup.domain(), setup.m0());
  r.horizon_bound = HorizonBound(setup.domain(), setup.cost(),
                                 setup.kernel().k_min(), r.support_radius);
  r.trajectory_bound = TrajectoryBound(r.horizon_bound, setup.kernel().k_max(),
                                       r.support_radius);
  r.cost_cap = 10.0 * std::max(r.horizon_bound, r.grid.dt);
  r.fields = InducedFields(game, r.ensemble, r.horizon_bound,
                           config.binned_speed);
  r.exploitability = ExploitabilityAgainst(game, r.ensemble, r.fields,
                                           r.cost_cap,
                                           AdmissibilityPolicy::kRecord);
  r.certification = Certify(r.exploitability, r.tol);
  try {
    r.m_infinity = LimitMeasure(setup.domain(), r.ensemble);
  } catch (const HorizonError&) {
  }
  r.ledger = BuildLedger(game, setup.m0(), config, r);
  return r;
}

ordered_json StabilityJson(const SpatialDomain& domain,
                           const StabilityReport& s) {
  ordered_json members = ordered_json::array();
  for (const StabilityMember& m : s.members) {
    ordered_json j = {{"label", m.label},
                      {"parameter", Num(m.parameter)},
                      {"w1_to_base", Num(m.w1_to_base)},
                      {"solved", m.solved}};
    if (m.solved) {
      j["converged"] = m.converged;
      j["epsilon"] = Num(m.epsilon);
      j["m_infinity"] = MeasureJson(domain, m.m_infinity);
      j["limit_distance"] = Num(m.limit_distance);
      j["cross_exploitability"] = Num(m.cross_exploitability);
    } else {
      j["error"] = m.error;
    }
    members.push_back(j);
  }
  ordered_json limits = ordered_json::array();
  for (const ParticleMeasure& l : s.base_limits) {
    limits.push_back(MeasureJson(domain, l));
  }
  return {{"base_m0", MeasureJson(domain, s.base_m0)},
          {"base_converged", s.base_converged},
          {"base_limits", limits},
          {"members", members},
          {"closed_graph_probe",
           {{"member", s.probe_member},
            {"w1_to_base", Num(s.probe_w1)},
            {"epsilon", Num(s.probe_epsilon)},
            {"threshold", Num(s.probe_threshold)},
            {"passed", s.probe_passed}}},
          {"note",
           "limit distances compare against the limits of the runs actually "
           "performed, which may under-cover the full limit set"}};
}

StabilityReport RunStability(const Scenario& scenario, const GameSetup& setup) {
  const StabilitySpec& spec = *scenario.stability;
  if (spec.path.rfind("initial.", 0) != 0) {
    throw ScenarioError("stability.path must address the initial block");
  }
  auto measure_for = [&](double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    const Scenario s =
        ParseScenario(ApplyOverride(scenario.canonical_json, spec.path, buf));
    return BuildInitialMeasure(setup.domain(), s.initial, s.seed);
  };
  const ParticleMeasure base =
      spec.base.has_value() ? measure_for(*spec.base) : setup.m0();
  std::vector<FamilyMember> family;
  for (double v : spec.values) {
    char label[64];
    std::snprintf(label, sizeof(label), "%s=%.12g", spec.path.c_str(), v);
    family.push_back({label, v, measure_for(v)});
  }
  return StabilitySweep(setup.game(), base, family, scenario.equilibrium);
}

std::vector<std::string> SplitTopLevel(const std::string& s) {
  std::vector<std::string> out;
  int depth = 0;
  std::string cur;
  for (char c : s) {
    if (c == '[' || c == '{') ++depth;
    if (c == ']' || c == '}') --depth;
    if (c == ',' && depth == 0) {
      out.push_back(cur);
      cur.clear();
    } else {
      cur += c;
    }
  }
  if (!cur.empty()) out.push_back(cur);
  return out;
}

bool Close(double a, double b) {
  if (std::isnan(a) || std::isnan(b)) return std::isnan(a) && std::isnan(b);
  if (!std::isfinite(a) || !std::isfinite(b)) return a == b;
  return std::abs(a - b) <= 1e-7 * std::max(1.0, std::abs(a));
}

}  // namespace

std::string OutputRoot() {
  const char* env = std::getenv(kOutputRootEnv);
  return env != nullptr && *env != '\0' ? env : "runs";
}

std::string ApplyRunOverrides(const std::string& scenario_text,
                              const RunOverrides& overrides) {
  std::string text = scenario_text;
  if (overrides.seed.has_value()) {
    text = ApplyOverride(text, "seed", std::to_string(*overrides.seed));
  }
  if (overrides.tol.has_value()) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", *overrides.tol);
    text = ApplyOverride(text, "equilibrium.tol", buf);
  }
  if (overrides.max_iterations.has_value()) {
    text = ApplyOverride(text, "equilibrium.max_iterations",
                         std::to_string(*overrides.max_iterations));
  }
  return text;
}

Analysis Analyze(const Scenario& scenario, const GameSetup& setup,
                 const EquilibriumReport& report) {
  const SpatialDomain& domain = setup.domain();
  const AsymptoticsSpec& spec = scenario.asymptotics;
  Analysis a;
  a.ledger = report.ledger;
  a.report_indices = ReportIndices(spec, report.grid);
  a.constants = DeriveBoundConstants(domain, setup.cost(),
                                     setup.kernel().k_min(),
                                     setup.kernel().k_max());
  a.settling_time = SettlingTime(report.ensemble);
  const double slack = 4.0 * (domain.resolution() + report.grid.dt);

  std::vector<double> times;
  for (int j : a.report_indices) times.push_back(report.grid.TimeAt(j));
  try {
    ConvergenceCurve curve =
        ComputeConvergenceCurve(domain, report.ensemble, times, spec.p);
    AttachTailBound(domain, setup.m0(), a.constants, &curve);
    a.curve = std::move(curve);
  } catch (const Error& e) {
    a.curve_error = e.what();
  }

  if (a.curve.has_value()) {
    double worst = -std::numeric_limits<double>::infinity();
    int violations = 0;
    for (std::size_t i = 0; i < a.curve->times.size(); ++i) {
      if (std::isnan(a.curve->bounds[i])) continue;
      const double lhs = std::pow(a.curve->values[i], spec.p);
      const double excess = lhs - a.curve->bounds[i];
      worst = std::max(worst, excess);
      if (excess > slack) ++violations;
    }
    if (!std::isfinite(worst)) worst = 0.0;
    char buf[160];
    std::snprintf(buf, sizeof(buf),
                  "%d violations of W_p^p <= tail bound + 4 (dx + dt); "
                  "alpha = %.6g, t0 = %.6g",
                  violations, a.constants.alpha, a.constants.t0);
    a.ledger.Add({"tail_bound", violations == 0, worst, slack, buf});
  } else {
    a.ledger.Add({"tail_bound", false, 0.0, slack,
                  "no convergence curve: " + a.curve_error});
  }

  {
    const double bound =
        HorizonBound(domain, setup.cost(), setup.kernel().k_min(),
                     report.support_radius) +
        report.grid.dt;
    const bool ok = a.settling_time.has_value() && *a.settling_time <= bound;
    a.ledger.Add({"settling_time", ok,
                  a.settling_time.value_or(
                      std::numeric_limits<double>::infinity()),
                  bound, "t_* against T(support radius) + dt"});
  }

  {
    const Point origin = Point::At(domain.origin());
    double moment_cap = 0.0;
    for (const Atom& atom : setup.m0().atoms()) {
      const double r = domain.Distance(origin, atom.location);
      const double psi = TrajectoryBound(
          HorizonBound(domain, setup.cost(), setup.kernel().k_min(), r),
          setup.kernel().k_max(), r);
      moment_cap += atom.weight * std::pow(psi, spec.p);
    }
    double worst = 0.0;
    for (int j : a.report_indices) {
      worst = std::max(worst,
                       PMoment(domain, report.ensemble.MarginalAt(j), spec.p));
    }
    a.ledger.Add({"moment_bound", worst <= moment_cap + 1e-9, worst,
                  moment_cap, "max over report times of the p-moment of m_t"});
  }

  if (spec.rate_fit != "none" && a.curve.has_value()) {
    try {
      a.rate_fit = FitDecayRate(
          *a.curve, spec.fit_lo, spec.fit_hi,
          spec.rate_fit == "power" ? FitMode::kPower : FitMode::kExponential,
          spec.dimension);
    } catch (const Error& e) {
      a.rate_fit_error = e.what();
    }
  }
  return a;
}

RunOutcome RunScenario(const std::string& scenario_text,
                       const std::string& directory) {
  RunOutcome outcome;
  outcome.directory = directory;
  Scenario scenario;
  try {
    scenario = ParseScenario(scenario_text);
  } catch (const Error& e) {
    outcome.exit_code = kExitValidation;
    outcome.message = e.what();
    ArtifactWriter w(directory);
    w.Write("report.json",
            Dump({{"exit_code", kExitValidation},
                  {"status", "validation_failed"},
                  {"error", e.what()}}));
    w.WriteManifest(nullptr, kExitValidation);
    return outcome;
  }

  ArtifactWriter writer(directory);
  writer.Write("scenario.json", scenario.canonical_json);
  ordered_json report_json = {{"name", scenario.name},
                              {"description", scenario.description}};

  std::unique_ptr<GameSetup> setup;
  HypothesisReport hypotheses;
  try {
    setup = std::make_unique<GameSetup>(scenario);
    hypotheses = AllHypotheses(*setup);
  } catch (const Error& e) {
    outcome.exit_code = kExitValidation;
    outcome.message = e.what();
  }
  if (setup != nullptr && !hypotheses.AllPassed()) {
    outcome.exit_code = kExitValidation;
    outcome.message = "hypothesis checks failed: " + hypotheses.Summary();
  }
  if (outcome.exit_code == kExitValidation) {
    report_json["exit_code"] = kExitValidation;
    report_json["status"] = "validation_failed";
    report_json["error"] = outcome.message;
    report_json["hypotheses"] = HypothesesJson(hypotheses);
    writer.Write("report.json", Dump(report_json));
    writer.WriteManifest(&scenario, kExitValidation);
    return outcome;
  }

  const SpatialDomain& domain = setup->domain();
  const Game game = setup->game();
  EquilibriumReport report;
  try {
    report = SolveEquilibrium(game, setup->m0(), scenario.equilibrium);
  } catch (const HypothesisError& e) {
    outcome.exit_code = kExitValidation;
    outcome.message = e.what();
  } catch (const Error& e) {
    outcome.exit_code = kExitInternal;
    outcome.message = e.what();
  }
  if (outcome.exit_code != kExitOk) {
    report_json["exit_code"] = outcome.exit_code;
    report_json["status"] = outcome.exit_code == kExitValidation
                                ? "validation_failed"
                                : "internal_error";
    report_json["error"] = outcome.message;
    report_json["hypotheses"] = HypothesesJson(hypotheses);
    writer.Write("report.json", Dump(report_json));
    writer.WriteManifest(&scenario, outcome.exit_code);
    return outcome;
  }

  const Analysis analysis = Analyze(scenario, *setup, report);
  std::optional<StabilityReport> stability;
  std::string stability_error;
  if (scenario.stability.has_value()) {
    try {
      stability = RunStability(scenario, *setup);
    } catch (const Error& e) {
      stability_error = e.what();
    }
  }

  if (!report.converged) {
    outcome.exit_code = kExitNonConvergence;
    outcome.message = "no equilibrium within max_iterations";
  } else if (!analysis.ledger.AllPassed()) {
    outcome.exit_code = kExitInternal;
    outcome.message = "ledger checks failed: " + analysis.ledger.Summary();
  } else {
    outcome.message = "converged and certified";
  }

  const LipschitzEstimate lip =
      setup->kernel().EstimateLipschitz(report.trajectory_bound,
                                        domain.resolution());
  ordered_json phi0 = ordered_json::array();
  for (const Atom& a : setup->m0().atoms()) {
    phi0.push_back({{"at", CoordsJson(domain, a.location)},
                    {"phi", Num(report.fields.phi.At(domain, 0, a.location))}});
  }
  report_json["exit_code"] = outcome.exit_code;
  report_json["status"] = outcome.exit_code == kExitOk ? "certified"
                          : outcome.exit_code == kExitNonConvergence
                              ? "not_converged"
                              : "ledger_failed";
  report_json["converged"] = report.converged;
  report_json["purified"] = report.purified;
  report_json["iterations"] = report.history.size();
  report_json["epsilon"] = Num(report.exploitability.epsilon);
  report_json["max_gap"] = Num(report.exploitability.max_gap);
  report_json["min_gap"] = Num(report.exploitability.min_gap);
  report_json["non_exiting"] = report.exploitability.non_exiting;
  report_json["tol"] = Num(report.tol);
  report_json["tol_dpp"] = Num(report.tol_dpp);
  report_json["certification"] = {{"weak", report.certification.weak},
                                  {"strong", report.certification.strong},
                                  {"details", report.certification.details}};
  report_json["grid"] = {{"dt", Num(report.grid.dt)},
                         {"steps", report.grid.steps},
                         {"horizon", Num(report.grid.horizon())}};
  report_json["dx"] = Num(domain.resolution());
  report_json["support_radius"] = Num(report.support_radius);
  report_json["horizon_bound"] = Num(report.horizon_bound);
  report_json["trajectory_bound"] = Num(report.trajectory_bound);
  report_json["cost_cap"] = Num(report.cost_cap);
  report_json["k_min"] = Num(setup->kernel().k_min());
  report_json["k_max"] = Num(setup->kernel().k_max());
  report_json["kernel"] = setup->kernel().Describe();
  report_json["outside_hypothesis_coverage"] =
      setup->kernel().OutsideHypothesisCoverage();
  report_json["lipschitz_estimate"] = {{"value", Num(lip.value)},
                                       {"certified", lip.certified},
                                       {"warning", lip.warning}};
  if (scenario.equilibrium.binned_speed) {
    report_json["binning_error_bound"] =
        Num(setup->kernel().BinningErrorBound(domain.resolution()));
  }
  report_json["truncation_radius"] = Num(domain.truncation_radius());
  report_json["geodesic_constant"] = Num(domain.geodesic_constant());
  report_json["hypotheses"] = HypothesesJson(hypotheses);
  report_json["ensemble_members"] = report.ensemble.size();
  report_json["m0"] = MeasureJson(domain, setup->m0());
  report_json["phi_at_m0"] = phi0;
  report_json["m_infinity"] = MeasureJson(domain, report.m_infinity);
  report_json["settling_time"] =
      analysis.settling_time.has_value()
          ? ordered_json(Num(*analysis.settling_time))
          : ordered_json(nullptr);
  report_json["tail_bound_constants"] = {{"alpha", Num(analysis.constants.alpha)},
                                         {"t0", Num(analysis.constants.t0)}};
  if (!analysis.curve_error.empty()) {
    report_json["curve_error"] = analysis.curve_error;
  }
  if (analysis.curve.has_value()) {
    report_json["curve_projected"] = analysis.curve->projected;
  }
  if (!stability_error.empty()) report_json["stability_error"] = stability_error;
  report_json["selection_rules"] = report.selection_rules;
  report_json["topology_note"] = kTopologyNote;

  writer.Write("report.json", Dump(report_json));
  writer.Write("ledger.json", Dump(LedgerJson(analysis.ledger)));
  writer.Write("exploitability_history.csv", HistoryCsv(report.history));
  writer.Write("trajectories.csv", TrajectoriesCsv(domain, report.ensemble));
  writer.Write("marginals.csv",
               MarginalsCsv(domain, report.ensemble, analysis.report_indices));
  writer.Write("value_field.csv",
               ValueFieldCsv(domain, report.fields.phi,
                             FieldIndices(report.grid)));
  if (analysis.curve.has_value()) {
    writer.Write("convergence_curve.csv", CurveCsv(*analysis.curve));
  }
  if (scenario.asymptotics.rate_fit != "none") {
    ordered_json fit = {{"mode", scenario.asymptotics.rate_fit},
                        {"window", {Num(scenario.asymptotics.fit_lo),
                                    Num(scenario.asymptotics.fit_hi)}},
                        {"dimension", scenario.asymptotics.dimension},
                        {"p", scenario.asymptotics.p}};
    if (analysis.rate_fit.has_value()) {
      fit["exponent"] = Num(analysis.rate_fit->exponent);
      fit["rate"] = Num(analysis.rate_fit->rate);
      fit["residual"] = Num(analysis.rate_fit->residual);
      fit["points"] = analysis.rate_fit->points;
    } else {
      fit["error"] = analysis.rate_fit_error.empty() ? analysis.curve_error
                                                     : analysis.rate_fit_error;
    }
    writer.Write("rate_fit.json", Dump(fit));
  }
  if (stability.has_value()) {
    writer.Write("stability_report.json",
                 Dump(StabilityJson(domain, *stability)));
  }
  writer.WriteManifest(&scenario, outcome.exit_code);
  return outcome;
}

VerifyOutcome VerifyRun(const std::string& directory,
                        const RunOverrides& overrides) {
  VerifyOutcome out;
  const fs::path dir(directory);
  json manifest;
  try {
    manifest = json::parse(ReadTextFile((dir / "manifest.json").string()));
  } catch (const json::exception&) {
    throw ArtifactError("manifest.json in " + directory + " is corrupted");
  }
  if (!manifest.contains("files") || !manifest["files"].is_object()) {
    throw ArtifactError("manifest.json in " + directory + " lists no files");
  }
  bool intact = true;
  for (auto it = manifest["files"].begin(); it != manifest["files"].end();
       ++it) {
    const std::string name = it.key();
    const fs::path path = dir / name;
    if (!fs::exists(path)) {
      out.differences.push_back(name + ": missing");
      intact = false;
      continue;
    }
    const std::string content = ReadTextFile(path.string());
    const std::string digest = HexDigest(Fnv1a64(content));
    if (content.size() != it.value().at("bytes").get<std::size_t>() ||
        digest != it.value().at("fnv1a64").get<std::string>()) {
      out.differences.push_back(name +
                                ": contents differ from the manifest "
                                "(modified or truncated)");
      intact = false;
    }
  }
  if (!intact || !manifest.contains("config_hash")) {
    if (!manifest.contains("config_hash")) {
      out.differences.push_back("manifest: run stopped before solving");
    }
    out.passed = false;
    out.exit_code = kExitVerifyMismatch;
    return out;
  }

  const std::string scenario_text = ApplyRunOverrides(
      ReadTextFile((dir / "scenario.json").string()), overrides);
  const Scenario scenario = ParseScenario(scenario_text);
  const json stored_report =
      json::parse(ReadTextFile((dir / "report.json").string()));
  const json stored_ledger =
      json::parse(ReadTextFile((dir / "ledger.json").string()));
  GameSetup setup(scenario);
  TimeGrid grid;
  grid.dt = FromNum(stored_report.at("grid").at("dt"));
  grid.steps = stored_report.at("grid").at("steps").get<int>();
  TrajectoryEnsemble ensemble = ParseTrajectoriesCsv(
      setup.domain(), grid,
      ReadTextFile((dir / "trajectories.csv").string()), "trajectories.csv");
  ensemble = UndoPrintRounding(setup.m0(), std::move(ensemble));
  EquilibriumReport report = Reconstruct(scenario, setup, std::move(ensemble));
  const Analysis analysis = Analyze(scenario, setup, report);

  std::map<std::string, const json*> stored;
  for (const json& c : stored_ledger.at("checks")) {
    stored[c.at("id").get<std::string>()] = &c;
  }
  for (const Check& c : analysis.ledger.checks()) {
    const auto it = stored.find(c.id);
    if (it == stored.end()) {
      out.differences.push_back("check " + c.id + ": not in ledger.json");
      continue;
    }
    const json& s = *it->second;
    const bool passed = s.at("passed").get<bool>();
    if (passed != c.passed) {
      out.differences.push_back("check " + c.id + ": passed " +
                                (passed ? "true" : "false") + " -> " +
                                (c.passed ? "true" : "false"));
    }
    const double m = FromNum(s.at("measured"));
    if (!Close(m, Round12(c.measured))) {
      out.differences.push_back("check " + c.id + ": measured " +
                                FormatDouble(m) + " -> " +
                                FormatDouble(c.measured));
    }
    const double t = FromNum(s.at("threshold"));
    if (!Close(t, Round12(c.threshold))) {
      out.differences.push_back("check " + c.id + ": threshold " +
                                FormatDouble(t) + " -> " +
                                FormatDouble(c.threshold));
    }
    stored.erase(it);
  }
  for (const auto& [id, j] : stored) {
    out.differences.push_back("check " + id + ": missing from recomputation");
  }
  const double eps = FromNum(stored_report.at("epsilon"));
  if (!Close(eps, report.exploitability.epsilon)) {
    out.differences.push_back("epsilon: " + FormatDouble(eps) + " -> " +
                              FormatDouble(report.exploitability.epsilon));
  }
  const json& cert = stored_report.at("certification");
  if (cert.at("weak").get<bool>() != report.certification.weak ||
      cert.at("strong").get<bool>() != report.certification.strong) {
    out.differences.push_back("certification flags changed: " +
                              report.certification.details);
  }
  out.passed = out.differences.empty();
  out.exit_code = out.passed ? kExitOk : kExitVerifyMismatch;
  return out;
}

SweepParameter ParseSweepParameter(const std::string& spec) {
  const std::size_t eq = spec.find('=');
  if (eq == std::string::npos || eq == 0) {
    throw ScenarioError("sweep parameter must look like path=v1,v2,...");
  }
  SweepParameter p;
  p.path = spec.substr(0, eq);
  p.values = SplitTopLevel(spec.substr(eq + 1));
  return p;
}

RunOutcome RunSweep(const std::string& template_text,
                    const std::vector<SweepParameter>& parameters,
                    const std::string& directory) {
  RunOutcome outcome;
  outcome.directory = directory;
  ArtifactWriter writer(directory);
  std::size_t total = parameters.empty() ? 0 : 1;
  for (const SweepParameter& p : parameters) total *= p.values.size();
  ordered_json members = ordered_json::array();
  for (std::size_t k = 0; k < total; ++k) {
    std::string text = template_text;
    ordered_json values = ordered_json::object();
    std::size_t rest = k;
    for (auto it = parameters.rbegin(); it != parameters.rend(); ++it) {
      const std::string& v = it->values[rest % it->values.size()];
      rest /= it->values.size();
      values[it->path] = v;
    }
    char name[32];
    std::snprintf(name, sizeof(name), "member_%03zu", k);
    ordered_json m = {{"index", k}, {"directory", name}, {"values", values}};
    try {
      for (const SweepParameter& p : parameters) {
        text = ApplyOverride(text, p.path, values[p.path].get<std::string>());
      }
      const RunOutcome r =
          RunScenario(text, (fs::path(directory) / name).string());
      m["exit_code"] = r.exit_code;
      m["message"] = r.message;
      const json rep = json::parse(
          ReadTextFile((fs::path(directory) / name / "report.json").string()));
      for (const char* key :
           {"converged", "epsilon", "m_infinity", "settling_time"}) {
        if (rep.contains(key)) m[key] = rep[key];
      }
      const fs::path fit = fs::path(directory) / name / "rate_fit.json";
      if (fs::exists(fit)) m["rate_fit"] = json::parse(ReadTextFile(fit.string()));
    } catch (const Error& e) {
      m["exit_code"] = kExitInternal;
      m["message"] = e.what();
    }
    members.push_back(m);
  }
  ordered_json params = ordered_json::array();
  for (const SweepParameter& p : parameters) {
    params.push_back({{"path", p.path}, {"values", p.values}});
  }
  writer.Write("sweep_report.json",
               Dump({{"parameters", params}, {"members", members}}));
  writer.WriteManifest(nullptr, kExitOk);
  outcome.message = std::to_string(total) + " members";
  return outcome;
}

}  // namespace exitmfg
