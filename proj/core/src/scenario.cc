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

#include "exitmfg/scenario.h"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include <nlohmann/json.hpp>

#include "exitmfg/errors.h"

namespace exitmfg {
namespace {

using nlohmann::json;

// Strict view of one JSON object: every key must be consumed before Finish.
class Block {
 public:
  Block(const json& j, std::string where) : j_(j), where_(std::move(where)) {
    if (!j_.is_object()) {
      throw ScenarioError((where_.empty() ? "scenario" : where_) +
                          " must be a JSON object");
    }
  }

  std::string PathOf(const std::string& key) const {
    return where_.empty() ? key : where_ + "." + key;
  }

  bool Has(const std::string& key) {
    used_.insert(key);
    return j_.contains(key);
  }

  const json& Get(const std::string& key) {
    if (!Has(key)) throw ScenarioError("missing key '" + PathOf(key) + "'");
    return j_.at(key);
  }

  double Number(const std::string& key) {
    const json& v = Get(key);
    if (!v.is_number()) {
      throw ScenarioError("'" + PathOf(key) + "' must be a number");
    }
    return v.get<double>();
  }
  double Number(const std::string& key, double fallback) {
    return Has(key) ? Number(key) : fallback;
  }

  long Integer(const std::string& key, long fallback) {
    if (!Has(key)) return fallback;
    const json& v = j_.at(key);
    if (!v.is_number_integer() && !v.is_number_unsigned()) {
      throw ScenarioError("'" + PathOf(key) + "' must be an integer");
    }
    return v.get<long>();
  }

  std::string String(const std::string& key) {
    const json& v = Get(key);
    if (!v.is_string()) {
      throw ScenarioError("'" + PathOf(key) + "' must be a string");
    }
    return v.get<std::string>();
  }
  std::string String(const std::string& key, const std::string& fallback) {
    return Has(key) ? String(key) : fallback;
  }

  bool Bool(const std::string& key, bool fallback) {
    if (!Has(key)) return fallback;
    const json& v = j_.at(key);
    if (!v.is_boolean()) {
      throw ScenarioError("'" + PathOf(key) + "' must be true or false");
    }
    return v.get<bool>();
  }

  // A number or an array of numbers.
  std::vector<double> Numbers(const std::string& key) {
    const json& v = Get(key);
    return ToNumbers(v, PathOf(key));
  }

  std::vector<std::vector<double>> Rows(const std::string& key) {
    const json& v = Get(key);
    if (!v.is_array()) {
      throw ScenarioError("'" + PathOf(key) + "' must be an array of rows");
    }
    std::vector<std::vector<double>> rows;
    for (std::size_t i = 0; i < v.size(); ++i) {
      rows.push_back(
          ToNumbers(v[i], PathOf(key) + "[" + std::to_string(i) + "]"));
    }
    return rows;
  }

  Block Child(const std::string& key) { return Block(Get(key), PathOf(key)); }

  void Finish() const {
    for (auto it = j_.begin(); it != j_.end(); ++it) {
      if (!used_.count(it.key())) {
        throw ScenarioError("unknown key '" + PathOf(it.key()) + "'");
      }
    }
  }

  static std::vector<double> ToNumbers(const json& v, const std::string& at) {
    std::vector<double> out;
    if (v.is_number()) {
      out.push_back(v.get<double>());
      return out;
    }
    if (!v.is_array()) {
      throw ScenarioError("'" + at + "' must be a number or array of numbers");
    }
    for (const json& e : v) {
      if (!e.is_number()) {
        throw ScenarioError("'" + at + "' must contain only numbers");
      }
      out.push_back(e.get<double>());
    }
    return out;
  }

 private:
  const json& j_;
  std::string where_;
  std::set<std::string> used_;
};

Kappa ParseKappa(Block b) {
  const std::string family = b.String("family");
  Kappa k;
  if (family == "constant") {
    k = Kappa::Constant(b.Number("value"));
  } else if (family == "affine_clamped") {
    k = Kappa::AffineClamped(b.Number("a"), b.Number("b"), b.Number("floor"));
  } else if (family == "exponential") {
    k = Kappa::Exponential(b.Number("a"), b.Number("b"));
  } else {
    throw ScenarioError("unknown kappa family '" + family + "'");
  }
  b.Finish();
  return k;
}

Chi ParseChi(Block b) {
  const std::string family = b.String("family");
  Chi c;
  if (family == "constant") {
    c = Chi::Constant(b.Number("amplitude"));
  } else if (family == "indicator") {
    c = Chi::IndicatorBall(b.Number("radius"), b.Number("amplitude", 1.0));
  } else if (family == "gaussian") {
    c = Chi::Gaussian(b.Number("sigma"), b.Number("amplitude", 1.0));
  } else {
    throw ScenarioError("unknown chi family '" + family + "'");
  }
  b.Finish();
  return c;
}

Eta ParseEta(Block b) {
  const std::string family = b.String("family");
  Eta e;
  if (family == "constant") {
    e = Eta::Constant(b.Number("value"));
  } else if (family == "taper") {
    e = Eta::Taper(b.Number("value"), b.Number("rho"));
  } else {
    throw ScenarioError("unknown eta family '" + family + "'");
  }
  b.Finish();
  return e;
}

DomainSpec ParseDomain(Block b) {
  DomainSpec d;
  d.backend = b.String("backend");
  d.truncation_radius = b.Number("truncation_radius", 0.0);
  if (d.backend == "interval" || d.backend == "grid2d") {
    const std::size_t dim = d.backend == "interval" ? 1 : 2;
    d.lo = b.Numbers("lo");
    d.hi = b.Numbers("hi");
    d.dx = b.Number("dx");
    d.origin = b.Numbers("origin");
    d.target_boxes = b.Rows("targets");
    if (d.lo.size() != dim || d.hi.size() != dim || d.origin.size() != dim) {
      throw ScenarioError("domain.lo, domain.hi and domain.origin need " +
                          std::to_string(dim) + " coordinate(s)");
    }
    for (const auto& box : d.target_boxes) {
      if (box.size() != 2 * dim) {
        throw ScenarioError("each domain.targets box needs " +
                            std::to_string(2 * dim) + " numbers");
      }
    }
    if (dim == 2) d.connectivity = static_cast<int>(b.Integer("connectivity", 4));
  } else if (d.backend == "graph") {
    for (const auto& row : b.Rows("nodes")) {
      if (row.size() != 2 && row.size() != 1) {
        throw ScenarioError("graph nodes need one or two coordinates");
      }
      d.nodes.push_back({row[0], row.size() > 1 ? row[1] : 0.0});
    }
    for (const auto& row : b.Rows("edges")) {
      if (row.size() != 2 && row.size() != 3) {
        throw ScenarioError("graph edges are [a, b] or [a, b, length]");
      }
      d.edges.push_back({static_cast<NodeId>(row[0]),
                         static_cast<NodeId>(row[1]),
                         row.size() > 2 ? row[2] : 0.0});
    }
    for (double t : b.Numbers("targets")) {
      d.targets.push_back(static_cast<NodeId>(t));
    }
    d.origin_node = static_cast<NodeId>(b.Integer("origin", 0));
    const std::string metric = b.String("metric", "shortest_path");
    if (metric == "shortest_path") {
      d.metric = GraphMetric::kShortestPath;
    } else if (metric == "euclidean") {
      d.metric = GraphMetric::kEuclidean;
    } else {
      throw ScenarioError("unknown graph metric '" + metric + "'");
    }
  } else {
    throw ScenarioError("unknown domain backend '" + d.backend + "'");
  }
  b.Finish();
  return d;
}

ExitCostSpec ParseExitCost(Block b) {
  ExitCostSpec c;
  c.constant = b.Number("constant", 0.0);
  c.lipschitz = b.Number("lipschitz", -1.0);
  if (b.Has("table")) {
    for (const auto& row : b.Rows("table")) {
      if (row.size() < 2) {
        throw ScenarioError("exit_cost.table rows are [coords..., value]");
      }
      c.table.push_back(
          {std::vector<double>(row.begin(), row.end() - 1), row.back()});
    }
  }
  b.Finish();
  return c;
}

InitialSpec ParseInitial(Block b) {
  InitialSpec s;
  s.kind = b.String("kind");
  s.particles = static_cast<int>(b.Integer("particles", 1));
  const std::string mode = b.String("sampling", "quantile");
  if (mode == "quantile") {
    s.sampling = SamplingMode::kQuantile;
  } else if (mode == "iid") {
    s.sampling = SamplingMode::kIid;
  } else {
    throw ScenarioError("initial.sampling must be 'quantile' or 'iid'");
  }
  if (s.kind == "dirac") {
    s.at = b.Numbers("at");
  } else if (s.kind == "uniform") {
    s.lo = b.Numbers("lo");
    s.hi = b.Numbers("hi");
  } else if (s.kind == "power_tail") {
    s.r0 = b.Number("r0");
    s.beta = b.Number("beta");
  } else if (s.kind == "exp_tail") {
    s.r0 = b.Number("r0");
    s.gamma0 = b.Number("gamma0");
  } else if (s.kind == "atoms") {
    s.atoms = b.Rows("atoms");
  } else {
    throw ScenarioError("unknown initial kind '" + s.kind + "'");
  }
  if (s.particles < 1) throw ScenarioError("initial.particles must be >= 1");
  b.Finish();
  return s;
}

EquilibriumConfig ParseEquilibrium(Block b) {
  EquilibriumConfig c;
  const std::string damping = b.String("damping", "fictitious_play");
  if (damping == "fictitious_play") {
    c.damping = DampingRule::kFictitiousPlay;
  } else if (damping == "constant") {
    c.damping = DampingRule::kConstant;
  } else {
    throw ScenarioError("equilibrium.damping must be 'fictitious_play' or "
                        "'constant'");
  }
  c.lambda = b.Number("lambda", c.lambda);
  c.tol = b.Number("tol", c.tol);
  c.max_iterations = static_cast<int>(b.Integer("max_iterations", 50));
  if (b.Has("tol_dpp")) c.tol_dpp = b.Number("tol_dpp");
  if (b.Has("dt")) c.dt = b.Number("dt");
  if (b.Has("confinement_radii")) {
    c.confinement_radii = b.Numbers("confinement_radii");
  }
  b.Finish();
  try {
    c.Validate();
  } catch (const PreconditionError& e) {
    throw ScenarioError(std::string("equilibrium: ") + e.what());
  }
  return c;
}

AsymptoticsSpec ParseAsymptotics(Block b) {
  AsymptoticsSpec a;
  a.p = static_cast<int>(b.Integer("p", 1));
  if (a.p != 1 && a.p != 2) throw ScenarioError("asymptotics.p must be 1 or 2");
  if (b.Has("report_times")) a.report_times = b.Numbers("report_times");
  a.report_every = static_cast<int>(b.Integer("report_every", 1));
  if (a.report_every < 1) {
    throw ScenarioError("asymptotics.report_every must be >= 1");
  }
  if (b.Has("rate_fit")) {
    Block f = b.Child("rate_fit");
    a.rate_fit = f.String("mode");
    if (a.rate_fit != "power" && a.rate_fit != "exp" && a.rate_fit != "none") {
      throw ScenarioError("asymptotics.rate_fit.mode must be power, exp or "
                          "none");
    }
    const std::vector<double> w = f.Numbers("window");
    if (w.size() != 2 || !(w[0] < w[1])) {
      throw ScenarioError("asymptotics.rate_fit.window must be [lo, hi] with "
                          "lo < hi");
    }
    a.fit_lo = w[0];
    a.fit_hi = w[1];
    a.dimension = static_cast<int>(f.Integer("dimension", 1));
    f.Finish();
  }
  b.Finish();
  return a;
}

StabilitySpec ParseStability(Block b) {
  StabilitySpec s;
  s.path = b.String("path");
  if (b.Has("base")) s.base = b.Number("base");
  s.values = b.Numbers("values");
  b.Finish();
  return s;
}

bool InBox(const Coords& c, const std::vector<double>& box, double tol) {
  for (std::size_t d = 0; d * 2 < box.size(); ++d) {
    if (c[d] < box[2 * d] - tol || c[d] > box[2 * d + 1] + tol) return false;
  }
  return true;
}

Coords ToCoords(const std::vector<double>& v) {
  return {v.empty() ? 0.0 : v[0], v.size() > 1 ? v[1] : 0.0};
}

NodeId NodeAt(const SpatialDomain& domain, const std::vector<double>& v,
              const char* what) {
  const Coords c = ToCoords(v);
  const NodeId n = domain.NearestNode(c);
  const Coords& got = domain.coordinates(n);
  const double off = std::hypot(got[0] - c[0], got[1] - c[1]);
  if (off > 0.5 * domain.resolution() + 1e-12) {
    throw ScenarioError(std::string(what) + " lies outside the domain");
  }
  return n;
}

const std::map<std::string, std::string>& Registry() {
  static const auto* registry = new std::map<std::string, std::string>{
      {"remark_5_3", R"({
  "schema": 1,
  "name": "remark_5_3",
  "description": "Corridor [0, 1] with exits at both ends, unit speed, zero exit cost and all mass at the midpoint.",
  "domain": {"backend": "interval", "lo": 0, "hi": 1, "dx": 0.005,
             "targets": [[0, 0], [1, 1]], "origin": 0},
  "exit_cost": {"constant": 0},
  "kernel": {"kappa": {"family": "constant", "value": 1},
             "chi": {"family": "constant", "amplitude": 0},
             "eta": {"family": "constant", "value": 1}},
  "initial": {"kind": "dirac", "at": 0.5},
  "equilibrium": {"damping": "fictitious_play", "tol": 0.02,
                  "max_iterations": 20},
  "asymptotics": {"p": 1, "report_every": 1},
  "seed": 1
})"},
      {"remark_5_13", R"({
  "schema": 1,
  "name": "remark_5_13",
  "description": "Same corridor with all mass at a; the limit jumps from the left exit to the right one as a crosses 1/2.",
  "domain": {"backend": "interval", "lo": 0, "hi": 1, "dx": 0.005,
             "targets": [[0, 0], [1, 1]], "origin": 0},
  "exit_cost": {"constant": 0},
  "kernel": {"kappa": {"family": "constant", "value": 1},
             "chi": {"family": "constant", "amplitude": 0},
             "eta": {"family": "constant", "value": 1}},
  "initial": {"kind": "dirac", "at": 0.3},
  "equilibrium": {"damping": "fictitious_play", "tol": 0.02,
                  "max_iterations": 20},
  "asymptotics": {"p": 1, "report_every": 1},
  "stability": {"path": "initial.at", "base": 0.5,
                "values": [0.4, 0.45, 0.475, 0.49, 0.495]},
  "seed": 1
})"},
      {"power_tail_cor56a", R"({
  "schema": 1,
  "name": "power_tail_cor56a",
  "description": "Half line truncated at 30 with the exit at 0, unit speed and an initial law with density proportional to r^-4 beyond r = 1.",
  "domain": {"backend": "interval", "lo": 0, "hi": 30, "dx": 0.02,
             "targets": [[0, 0]], "origin": 0, "truncation_radius": 30},
  "exit_cost": {"constant": 0},
  "kernel": {"kappa": {"family": "constant", "value": 1},
             "chi": {"family": "constant", "amplitude": 0},
             "eta": {"family": "constant", "value": 1}},
  "initial": {"kind": "power_tail", "r0": 1, "beta": 4, "particles": 4000,
              "sampling": "quantile"},
  "equilibrium": {"damping": "fictitious_play", "tol": 0.02,
                  "max_iterations": 5},
  "asymptotics": {"p": 1, "report_every": 5,
                  "rate_fit": {"mode": "power", "window": [2, 10],
                               "dimension": 1}},
  "seed": 1
})"},
      {"exp_tail_cor56b", R"({
  "schema": 1,
  "name": "exp_tail_cor56b",
  "description": "Half line truncated at 30 with the exit at 0, unit speed and an initial law with density proportional to exp(-2 r) beyond r = 1.",
  "domain": {"backend": "interval", "lo": 0, "hi": 30, "dx": 0.02,
             "targets": [[0, 0]], "origin": 0, "truncation_radius": 30},
  "exit_cost": {"constant": 0},
  "kernel": {"kappa": {"family": "constant", "value": 1},
             "chi": {"family": "constant", "amplitude": 0},
             "eta": {"family": "constant", "value": 1}},
  "initial": {"kind": "exp_tail", "r0": 1, "gamma0": 2, "particles": 4000,
              "sampling": "quantile"},
  "equilibrium": {"damping": "fictitious_play", "tol": 0.02,
                  "max_iterations": 5},
  "asymptotics": {"p": 1, "report_every": 5,
                  "rate_fit": {"mode": "exp", "window": [1.5, 4],
                               "dimension": 1}},
  "seed": 1
})"},
      {"congested_corridor", R"({
  "schema": 1,
  "name": "congested_corridor",
  "description": "Corridor [0, 1] with the exit at 1; speed max(0.2, 1 - s) under a Gaussian interaction of width 0.05; m0 uniform on [0, 0.2].",
  "domain": {"backend": "interval", "lo": 0, "hi": 1, "dx": 0.01,
             "targets": [[1, 1]], "origin": 0},
  "exit_cost": {"constant": 0},
  "kernel": {"kappa": {"family": "affine_clamped", "a": 1, "b": 1,
                       "floor": 0.2},
             "chi": {"family": "gaussian", "sigma": 0.05, "amplitude": 1},
             "eta": {"family": "constant", "value": 1}},
  "initial": {"kind": "uniform", "lo": 0, "hi": 0.2, "particles": 200,
              "sampling": "quantile"},
  "equilibrium": {"damping": "constant", "lambda": 0.5, "dt": 0.0025,
                  "tol": 0.05, "max_iterations": 60},
  "asymptotics": {"p": 1, "report_every": 5},
  "seed": 1
})"},
  };
  return *registry;
}

json ParseJson(const std::string& text) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    throw ScenarioError(std::string("scenario is not valid JSON: ") + e.what());
  }
}

}  // namespace

Scenario ParseScenario(const std::string& json_text) {
  const json root = ParseJson(json_text);
  Block b(root, "");
  const long schema = b.Integer("schema", -1);
  if (schema != kScenarioSchema) {
    throw ScenarioError("unsupported or missing scenario schema (expected " +
                        std::to_string(kScenarioSchema) + ")");
  }
  Scenario s;
  s.name = b.String("name", "scenario");
  s.description = b.String("description", "");
  s.domain = ParseDomain(b.Child("domain"));
  s.exit_cost = b.Has("exit_cost") ? ParseExitCost(b.Child("exit_cost"))
                                   : ExitCostSpec{};
  {
    Block k = b.Child("kernel");
    s.kernel.kappa = ParseKappa(k.Child("kappa"));
    s.kernel.chi = ParseChi(k.Child("chi"));
    s.kernel.eta = ParseEta(k.Child("eta"));
    s.kernel.binned = k.Bool("binned", false);
    k.Finish();
  }
  s.initial = ParseInitial(b.Child("initial"));
  s.equilibrium = b.Has("equilibrium")
                      ? ParseEquilibrium(b.Child("equilibrium"))
                      : EquilibriumConfig{};
  s.equilibrium.binned_speed = s.kernel.binned;
  s.asymptotics = b.Has("asymptotics")
                      ? ParseAsymptotics(b.Child("asymptotics"))
                      : AsymptoticsSpec{};
  if (b.Has("stability")) s.stability = ParseStability(b.Child("stability"));
  s.output = b.String("output", s.name);
  const long seed = b.Integer("seed", 0);
  if (seed < 0) throw ScenarioError("seed must be nonnegative");
  s.seed = static_cast<std::uint64_t>(seed);
  s.equilibrium.seed = s.seed;
  b.Finish();
  s.canonical_json = root.dump(2) + "\n";
  return s;
}

std::vector<std::string> RegistryNames() {
  std::vector<std::string> names;
  for (const auto& [name, text] : Registry()) names.push_back(name);
  return names;
}

bool IsRegistryName(const std::string& name) {
  return Registry().count(name) > 0;
}

std::string RegistryScenarioJson(const std::string& name) {
  const auto it = Registry().find(name);
  if (it == Registry().end()) {
    throw ScenarioError("unknown registry scenario '" + name + "'");
  }
  return it->second;
}

std::string LoadScenarioText(const std::string& name_or_path) {
  if (IsRegistryName(name_or_path)) return RegistryScenarioJson(name_or_path);
  std::ifstream in(name_or_path);
  if (!in) {
    throw ScenarioError("'" + name_or_path +
                        "' is neither a registry name nor a readable file");
  }
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string ApplyOverride(const std::string& json_text,
                          const std::string& path, const std::string& value) {
  json root = ParseJson(json_text);
  json parsed;
  try {
    parsed = json::parse(value);
  } catch (const json::parse_error&) {
    parsed = value;
  }
  json* node = &root;
  std::size_t start = 0;
  for (;;) {
    const std::size_t dot = path.find('.', start);
    const std::string key = path.substr(start, dot - start);
    if (key.empty()) throw ScenarioError("empty component in path '" + path + "'");
    if (!node->is_object()) {
      throw ScenarioError("path '" + path + "' crosses a non-object value");
    }
    if (dot == std::string::npos) {
      json& slot = (*node)[key];
      if (slot.is_array() && !parsed.is_array()) {
        slot = json::array({parsed});
      } else {
        slot = parsed;
      }
      break;
    }
    node = &(*node)[key];
    start = dot + 1;
  }
  return root.dump(2) + "\n";
}

SpatialDomain BuildDomain(const DomainSpec& spec) {
  const double tol = 1e-9 * std::max(spec.dx, 1e-300);
  auto predicate = [&spec, tol](const Coords& c) {
    for (const auto& box : spec.target_boxes) {
      if (InBox(c, box, tol)) return true;
    }
    return false;
  };
  if (spec.backend == "interval") {
    SpatialDomain d = SpatialDomain::Interval(spec.lo[0], spec.hi[0], spec.dx,
                                              predicate, spec.origin[0]);
    d.set_truncation_radius(spec.truncation_radius);
    return d;
  }
  if (spec.backend == "grid2d") {
    SpatialDomain d = SpatialDomain::Grid2d(
        ToCoords(spec.lo), ToCoords(spec.hi), spec.dx, spec.connectivity,
        predicate, ToCoords(spec.origin));
    d.set_truncation_radius(spec.truncation_radius);
    return d;
  }
  if (spec.backend == "graph") {
    SpatialDomain d = SpatialDomain::Graph(spec.nodes, spec.edges, spec.metric,
                                           spec.targets, spec.origin_node);
    d.set_truncation_radius(spec.truncation_radius);
    return d;
  }
  throw ScenarioError("unknown domain backend '" + spec.backend + "'");
}

ExitCost BuildExitCost(const SpatialDomain& domain, const ExitCostSpec& spec) {
  if (spec.table.empty()) {
    ExitCost c = ExitCost::Constant(domain, spec.constant);
    return c;
  }
  std::vector<std::pair<NodeId, double>> rows;
  for (const auto& [coords, value] : spec.table) {
    const NodeId n = NodeAt(domain, coords, "exit_cost.table entry");
    if (!domain.IsTarget(n)) {
      throw ScenarioError("exit_cost.table entry " + domain.Describe(n) +
                          " is not a target node");
    }
    rows.push_back({n, value});
  }
  return ExitCost::FromTable(domain, rows, spec.lipschitz);
}

CongestionKernel BuildKernel(const KernelSpec& spec) {
  return CongestionKernel(spec.kappa, spec.chi, spec.eta);
}

double PowerTailQuantile(double u, double r0, double beta, double r_max) {
  if (!(r0 > 0.0) || !(beta > 1.0) || !(r_max > r0)) {
    throw PreconditionError("power tail needs r0 > 0, beta > 1, r_max > r0");
  }
  const double e = 1.0 - beta;
  const double a = std::pow(r0, e);
  const double b = std::pow(r_max, e);
  return std::pow(a - u * (a - b), 1.0 / e);
}

double ExpTailQuantile(double u, double r0, double gamma0, double r_max) {
  if (!(gamma0 > 0.0) || !(r_max > r0)) {
    throw PreconditionError("exponential tail needs gamma0 > 0, r_max > r0");
  }
  const double span = -std::expm1(-gamma0 * (r_max - r0));
  return r0 - std::log1p(-u * span) / gamma0;
}

ParticleMeasure BuildInitialMeasure(const SpatialDomain& domain,
                                    const InitialSpec& spec,
                                    std::uint64_t seed) {
  if (spec.kind == "dirac") {
    return ParticleMeasure::Dirac(
        Point::At(NodeAt(domain, spec.at, "initial.at")));
  }
  if (spec.kind == "atoms") {
    std::vector<Atom> atoms;
    for (const auto& row : spec.atoms) {
      if (row.size() < 2) {
        throw ScenarioError("initial.atoms rows are [coords..., weight]");
      }
      const std::vector<double> c(row.begin(), row.end() - 1);
      atoms.push_back({Point::At(NodeAt(domain, c, "initial atom")),
                       row.back()});
    }
    const ParticleMeasure mu(std::move(atoms));
    if (!(mu.total_mass() > 0.0)) {
      throw ScenarioError("initial.atoms carry no mass");
    }
    return mu.Normalized();
  }
  const bool line = domain.kind() == BackendKind::kInterval;
  const double origin = domain.coordinates(domain.origin())[0];
  if (spec.kind == "uniform") {
    if (line) {
      const double lo = spec.lo.at(0);
      const double hi = spec.hi.at(0);
      if (!(hi >= lo)) throw ScenarioError("initial.hi must be >= initial.lo");
      return SampleFromQuantileFunction(
          domain, [lo, hi](double u) { return lo + u * (hi - lo); },
          spec.particles, spec.sampling, seed);
    }
    std::vector<double> density(domain.node_count(), 0.0);
    std::vector<double> box;
    for (std::size_t d = 0; d < spec.lo.size(); ++d) {
      box.push_back(spec.lo[d]);
      box.push_back(spec.hi.at(d));
    }
    for (std::size_t x = 0; x < density.size(); ++x) {
      if (InBox(domain.coordinates(static_cast<NodeId>(x)), box, 1e-12)) {
        density[x] = 1.0;
      }
    }
    return SampleFromDensity(domain, density, spec.particles,
                             SamplingMode::kIid, seed);
  }
  if (!line) {
    throw ScenarioError("initial kind '" + spec.kind +
                        "' requires the interval backend");
  }
  double r_max = 0.0;
  for (std::size_t x = 0; x < domain.node_count(); ++x) {
    r_max = std::max(r_max, domain.coordinates(static_cast<NodeId>(x))[0] -
                                origin);
  }
  if (spec.kind == "power_tail") {
    const double r0 = spec.r0;
    const double beta = spec.beta;
    return SampleFromQuantileFunction(
        domain,
        [=](double u) {
          return origin + PowerTailQuantile(u, r0, beta, r_max);
        },
        spec.particles, spec.sampling, seed);
  }
  if (spec.kind == "exp_tail") {
    const double r0 = spec.r0;
    const double g0 = spec.gamma0;
    return SampleFromQuantileFunction(
        domain,
        [=](double u) { return origin + ExpTailQuantile(u, r0, g0, r_max); },
        spec.particles, spec.sampling, seed);
  }
  throw ScenarioError("unknown initial kind '" + spec.kind + "'");
}

GameSetup::GameSetup(const Scenario& scenario)
    : domain_(BuildDomain(scenario.domain)),
      cost_(BuildExitCost(domain_, scenario.exit_cost)),
      kernel_(BuildKernel(scenario.kernel)),
      m0_(BuildInitialMeasure(domain_, scenario.initial, scenario.seed)) {}

}  // namespace exitmfg
