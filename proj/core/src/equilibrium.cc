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

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <string>
#include <utility>

#include "exitmfg/asymptotics.h"
#include "exitmfg/errors.h"

namespace exitmfg {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

std::string Fmt(const char* fmt, double a, double b = 0.0, double c = 0.0) {
  char buf[160];
  std::snprintf(buf, sizeof(buf), fmt, a, b, c);
  return buf;
}

std::vector<double> DefaultRadii(double r_max) {
  if (!(r_max > 0.0)) return {0.0};
  return {0.25 * r_max, 0.5 * r_max, 0.75 * r_max, r_max};
}

}  // namespace

void EquilibriumConfig::Validate() const {
  if (max_iterations < 1) {
    throw PreconditionError("max_iterations must be at least 1");
  }
  if (!(tol > 0.0)) throw PreconditionError("tolerance must be positive");
  if (damping == DampingRule::kConstant && !(lambda > 0.0 && lambda <= 1.0)) {
    throw PreconditionError("constant damping needs lambda in (0, 1]");
  }
  if (tol_dpp.has_value() && !(*tol_dpp > 0.0)) {
    throw PreconditionError("tol_dpp must be positive");
  }
  if (dt.has_value() && !(*dt > 0.0)) {
    throw PreconditionError("time step must be positive");
  }
  if (horizon_radius.has_value() && !(*horizon_radius >= 0.0)) {
    throw PreconditionError("horizon radius must be nonnegative");
  }
  for (double r : confinement_radii) {
    if (!(r >= 0.0)) throw PreconditionError("confinement radii must be >= 0");
  }
}

double DampingWeight(const EquilibriumConfig& config, int iteration) {
  if (config.damping == DampingRule::kConstant) return config.lambda;
  return 1.0 / (iteration + 1.0);
}

double SupportRadius(const SpatialDomain& domain, const ParticleMeasure& mu) {
  double r = 0.0;
  const Point origin = Point::At(domain.origin());
  for (const Atom& a : mu.atoms()) {
    r = std::max(r, domain.Distance(origin, a.location));
  }
  return r;
}

TimeGrid RunTimeGrid(const Game& game, const ParticleMeasure& m0,
                     const EquilibriumConfig& config) {
  const double radius =
      config.horizon_radius.value_or(SupportRadius(game.domain, m0));
  const double bound =
      HorizonBound(game.domain, game.cost, game.kernel.k_min(), radius);
  TimeGrid grid;
  grid.dt = config.dt.value_or(game.domain.resolution() / game.kernel.k_max());
  grid.steps = std::max(
      2, static_cast<int>(std::ceil((bound + 2.0 * grid.dt) / grid.dt - 1e-9)));
  return grid;
}

SpeedField InducedSpeedField(const Game& game, const TrajectoryEnsemble& q,
                             bool binned) {
  const TimeGrid& grid = q.grid();
  const SpatialDomain& domain = game.domain;
  const CongestionKernel& kernel = game.kernel;
  const std::size_t n = domain.node_count();
  SpeedField field(grid, n, kernel.k_min(), kernel.k_max());
  if (kernel.IsConstant()) {
    const double k = std::clamp(kernel.kappa()(0.0), kernel.k_min(),
                                kernel.k_max());
    for (int j = 0; j <= grid.steps; ++j) {
      std::span<double> s = field.mutable_slice(j);
      std::fill(s.begin(), s.end(), k);
    }
    return field;
  }
  ParticleMeasure previous;
  for (int j = 0; j <= grid.steps; ++j) {
    ParticleMeasure mu = q.MarginalAt(j);
    if (binned) mu = ProjectToNodes(domain, mu);
    std::span<double> s = field.mutable_slice(j);
    if (j > 0 && mu == previous) {
      const std::span<const double> prev = field.slice(j - 1);
      std::copy(prev.begin(), prev.end(), s.begin());
    } else {
      for (std::size_t x = 0; x < n; ++x) {
        s[x] = kernel.EvalSpeed(domain, mu, static_cast<NodeId>(x));
      }
    }
    previous = std::move(mu);
  }
  return field;
}

Fields InducedFields(const Game& game, const TrajectoryEnsemble& q,
                     std::optional<double> required_horizon, bool binned) {
  Fields f;
  f.speed = InducedSpeedField(game, q, binned);
  SolveOptions options;
  options.required_horizon = required_horizon;
  f.phi = SolveValue(game.domain, game.cost, f.speed, options);
  return f;
}

TrajectoryEnsemble BestResponseWithFields(const Game& game,
                                          const ParticleMeasure& m0,
                                          const Fields& fields) {
  TrajectoryEnsemble out(fields.phi.grid());
  for (const Atom& a : m0.atoms()) {
    out.Add(SynthesizeOptimal(game.domain, game.cost, fields.phi,
                              fields.speed, 0, a.location),
            a.weight);
  }
  return out;
}

TrajectoryEnsemble BestResponse(const Game& game, const ParticleMeasure& m0,
                                const TrajectoryEnsemble& q) {
  return BestResponseWithFields(game, m0,
                                InducedFields(game, q, std::nullopt, false));
}

ExploitabilityReport ExploitabilityAgainst(const Game& game,
                                           const TrajectoryEnsemble& q,
                                           const Fields& fields,
                                           double cost_cap,
                                           AdmissibilityPolicy policy) {
  const SpatialDomain& domain = game.domain;
  const TimeGrid& grid = q.grid();
  if (!(fields.phi.grid() == grid)) {
    throw PreconditionError("fields and ensemble use different time grids");
  }
  ExploitabilityReport report;
  report.max_gap = -kInf;
  report.min_gap = kInf;
  report.worst_excess = -kInf;
  double sum = 0.0;
  double carry = 0.0;
  for (std::size_t i = 0; i < q.members().size(); ++i) {
    const WeightedTrajectory& m = q.members()[i];
    const Trajectory& traj = m.trajectory;
    const AdmissibilityReport adm =
        IsAdmissible(domain, traj, fields.speed, domain.resolution());
    report.worst_excess = std::max(report.worst_excess, adm.worst_excess);
    if (!adm.admissible) {
      if (policy == AdmissibilityPolicy::kThrow) {
        throw CertificationError(
            "trajectory " + std::to_string(i) + " from " +
            domain.Describe(traj.samples[traj.start_index]) +
            " is not admissible under its induced field (step " +
            std::to_string(adm.worst_step) + ", excess " +
            Fmt("%.6g", adm.worst_excess) + ")");
      }
      report.admissible = false;
      ++report.inadmissible_members;
    }
    double realized = RealizedCost(domain, traj, grid, game.cost);
    if (!std::isfinite(realized)) {
      realized = cost_cap;
      ++report.non_exiting;
    }
    const double base =
        fields.phi.At(domain, traj.start_index, traj.samples[traj.start_index]);
    const double gap = realized - base;
    report.gaps.push_back(gap);
    if (m.weight > 0.0) {
      report.max_gap = std::max(report.max_gap, gap);
      report.min_gap = std::min(report.min_gap, gap);
    }
    const double term = m.weight * gap;
    const double t = sum + term;
    carry += std::abs(sum) >= std::abs(term) ? (sum - t) + term
                                             : (term - t) + sum;
    sum = t;
  }
  report.epsilon = sum + carry;
  if (q.members().empty()) {
    report.max_gap = 0.0;
    report.min_gap = 0.0;
    report.worst_excess = 0.0;
  }
  return report;
}

ExploitabilityReport Exploitability(const Game& game,
                                    const TrajectoryEnsemble& q,
                                    double cost_cap,
                                    AdmissibilityPolicy policy, bool binned) {
  return ExploitabilityAgainst(
      game, q, InducedFields(game, q, std::nullopt, binned), cost_cap, policy);
}

Certification Certify(const ExploitabilityReport& report, double tol) {
  Certification c;
  c.epsilon = report.epsilon;
  c.max_gap = report.max_gap;
  c.weak = report.epsilon <= tol;
  c.strong = report.max_gap <= tol;
  c.details = Fmt("epsilon = %.6g, max gap = %.6g, tol = %.6g",
                  report.epsilon, report.max_gap, tol);
  if (report.non_exiting > 0) {
    c.details += ", " + std::to_string(report.non_exiting) +
                 " non-exiting trajectories charged the cost cap";
  }
  return c;
}

Certification Certify(const Game& game, const TrajectoryEnsemble& q,
                      double tol, double cost_cap) {
  return Certify(
      Exploitability(game, q, cost_cap, AdmissibilityPolicy::kRecord), tol);
}

CheckLedger BuildLedger(const Game& game, const ParticleMeasure& m0,
                        const EquilibriumConfig& config,
                        const EquilibriumReport& report) {
  const SpatialDomain& domain = game.domain;
  const TimeGrid& grid = report.grid;
  const TrajectoryEnsemble& q = report.ensemble;
  const ValueField& phi = report.fields.phi;
  const double k_min = game.kernel.k_min();
  const double k_max = game.kernel.k_max();
  const double max_g = game.cost.MaxValue(domain);
  const Point origin = Point::At(domain.origin());
  CheckLedger ledger;

  {
    const bool same = q.InitialMarginal() == m0;
    ledger.Add({"initial_marginal", same, same ? 0.0 : 1.0, 0.0,
                "e_0 # Q reproduces m0 atom for atom"});
  }
  {
    double worst = -kInf;
    std::string where;
    for (std::size_t x = 0; x < domain.node_count(); ++x) {
      const NodeId id = static_cast<NodeId>(x);
      const double bound =
          HorizonBound(domain, game.cost, k_min,
                       domain.Distance(domain.origin(), id)) +
          max_g;
      for (int j = 0; j <= grid.steps; ++j) {
        const double excess = phi.at(j, id) - bound;
        if (excess > worst) {
          worst = excess;
          where = domain.Describe(id) + Fmt(" at t = %.6g", grid.TimeAt(j));
        }
      }
    }
    ledger.Add({"value_bound", worst <= 1e-9, worst, 1e-9,
                "max of phi(t, x) - T(d(0, x)) - max g, attained " + where});
  }
  {
    double worst = -kInf;
    for (const auto& m : q.members()) {
      const Trajectory& t = m.trajectory;
      const double r = domain.Distance(origin, t.samples[t.start_index]);
      const double psi = TrajectoryBound(
          HorizonBound(domain, game.cost, k_min, r), k_max, r);
      for (const Point& p : t.samples) {
        worst = std::max(worst, domain.Distance(origin, p) - psi);
      }
    }
    if (q.members().empty()) worst = 0.0;
    ledger.Add({"trajectory_confinement", worst <= domain.resolution(), worst,
                domain.resolution(),
                "max of d(0, gamma(t)) - psi(d(0, gamma(0)))"});
  }
  {
    std::vector<double> radii = config.confinement_radii;
    if (radii.empty()) radii = DefaultRadii(report.support_radius);
    double worst = kInf;
    std::string detail;
    for (double r : radii) {
      const double psi = TrajectoryBound(
          HorizonBound(domain, game.cost, k_min, r), k_max, r);
      double inside = 0.0;
      for (const Atom& a : m0.atoms()) {
        if (domain.Distance(origin, a.location) <= r + 1e-12) {
          inside += a.weight;
        }
      }
      double staying = 0.0;
      for (const auto& m : q.members()) {
        bool stays = true;
        for (const Point& p : m.trajectory.samples) {
          if (domain.Distance(origin, p) > psi + domain.resolution()) {
            stays = false;
            break;
          }
        }
        if (stays) staying += m.weight;
      }
      const double margin = staying - inside;
      if (margin < worst) {
        worst = margin;
        detail = Fmt("R = %.6g: Q(stay in psi-ball) = %.6g, m0(R-ball) = %.6g",
                     r, staying, inside);
      }
    }
    ledger.Add({"confinement_set", worst >= -1e-12, worst, -1e-12, detail});
  }
  {
    double eq = 0.0;
    double ineq = 0.0;
    for (const auto& m : q.members()) {
      const DppReport d = CheckDpp(domain, phi, m.trajectory);
      eq = std::max(eq, d.equality_residual);
      ineq = std::min(ineq, d.inequality_residual);
    }
    const double eq_tol = report.tol + report.tol_dpp;
    ledger.Add({"dpp_equality", eq <= eq_tol, eq, eq_tol,
                "max |phi(t0 + h, gamma) + h - phi(t0, x0)| along members"});
    ledger.Add({"dpp_inequality", ineq >= -report.tol_dpp, ineq,
                -report.tol_dpp,
                "min of phi(t0 + h, gamma) + h - phi(t0, x0) along members"});
  }
  {
    const ExploitabilityReport& e = report.exploitability;
    const double low = std::min(e.epsilon, e.min_gap);
    ledger.Add({"exploitability_nonnegative", low >= -report.tol_dpp, low,
                -report.tol_dpp, "min of epsilon and the smallest member gap"});
    ledger.Add({"admissibility", e.admissible, e.worst_excess, 0.0,
                std::to_string(e.inadmissible_members) +
                    " members exceed k dt + dx in some step"});
    ledger.Add({"non_exiting", e.non_exiting == 0,
                static_cast<double>(e.non_exiting), 0.0,
                "members that never reach the target"});
  }
  {
    const Certification& c = report.certification;
    ledger.Add({"weak_strong_agreement", c.weak == c.strong,
                c.weak == c.strong ? 0.0 : 1.0, 0.0,
                std::string("weak = ") + (c.weak ? "true" : "false") +
                    ", strong = " + (c.strong ? "true" : "false")});
  }
  {
    const RegularityReport r = CheckValueRegularity(
        domain, phi, report.support_radius, 2000, config.seed);
    ledger.Add({"value_time_quotient", r.time_floor_holds, r.min_time_quotient,
                -1.0,
                Fmt("min time quotient %.6g (floor -1), spatial ratio %.6g",
                    r.min_time_quotient, r.spatial_lipschitz_ratio)});
  }
  {
    bool in_target = !report.m_infinity.empty();
    for (const Atom& a : report.m_infinity.atoms()) {
      if (!domain.SnapToTarget(a.location).has_value()) in_target = false;
    }
    ledger.Add({"limit_in_target", in_target,
                static_cast<double>(report.m_infinity.size()), 0.0,
                in_target ? "every atom of m_infinity lies in the target"
                          : "m_infinity missing or not supported in the target"});
  }
  return ledger;
}

EquilibriumReport SolveEquilibrium(const Game& game, const ParticleMeasure& m0,
                                   const EquilibriumConfig& config) {
  config.Validate();
  const SpatialDomain& domain = game.domain;
  HypothesisReport hypotheses = ValidateHypotheses(domain, game.cost);
  hypotheses.Append(
      ValidateKernel(game.kernel, game.cost, domain.resolution()));
  if (!hypotheses.AllPassed()) {
    throw HypothesisError("hypothesis checks failed: " + hypotheses.Summary());
  }
  m0.RequireNormalized("initial measure");
  for (const Atom& a : m0.atoms()) domain.CheckNode(a.location.node);

  EquilibriumReport report;
  report.grid = RunTimeGrid(game, m0, config);
  report.tol = config.tol;
  report.tol_dpp = config.tol_dpp.value_or(DefaultTolDpp(report.grid, domain));
  report.support_radius = SupportRadius(domain, m0);
  const double radius = config.horizon_radius.value_or(report.support_radius);
  report.horizon_bound =
      HorizonBound(domain, game.cost, game.kernel.k_min(), radius);
  report.trajectory_bound =
      TrajectoryBound(report.horizon_bound, game.kernel.k_max(), radius);
  report.cost_cap = 10.0 * std::max(report.horizon_bound, report.grid.dt);
  report.selection_rules =
      "staying put wins ties; among equal values the shorter move wins, then "
      "the lower neighbour id; best responses start from the static field of "
      "m0";

  const bool binned = config.binned_speed;
  const double required = report.horizon_bound;
  TrajectoryEnsemble q = BestResponseWithFields(
      game, m0,
      InducedFields(game, StaticEnsemble(m0, report.grid), required, binned));

  auto certifiable = [&](const ExploitabilityReport& e) {
    return e.epsilon <= config.tol && e.admissible && e.non_exiting == 0 &&
           e.min_gap >= -report.tol_dpp;
  };
  auto accept = [&](TrajectoryEnsemble ensemble, Fields fields,
                    ExploitabilityReport e) {
    report.ensemble = std::move(ensemble);
    report.fields = std::move(fields);
    report.exploitability = std::move(e);
  };

  for (int n = 0; n < config.max_iterations; ++n) {
    Fields fields = InducedFields(game, q, required, binned);
    ExploitabilityReport e = ExploitabilityAgainst(
        game, q, fields, report.cost_cap, AdmissibilityPolicy::kRecord);
    IterationRecord record{n, e.epsilon, e.max_gap, 0.0, q.size()};
    TrajectoryEnsemble response = BestResponseWithFields(game, m0, fields);
    Fields response_fields = InducedFields(game, response, required, binned);
    ExploitabilityReport re =
        ExploitabilityAgainst(game, response, response_fields,
                              report.cost_cap, AdmissibilityPolicy::kRecord);
    const bool pure_ok = certifiable(re) && re.max_gap <= config.tol;
    if (certifiable(e)) {
      report.converged = true;
      report.history.push_back(record);
      if (pure_ok) {
        report.purified = true;
        accept(std::move(response), std::move(response_fields), std::move(re));
      } else {
        accept(std::move(q), std::move(fields), std::move(e));
      }
      break;
    }
    if (pure_ok) {
      report.converged = true;
      report.purified = true;
      record.lambda = 1.0;
      report.history.push_back(record);
      report.history.push_back(
          {n + 1, re.epsilon, re.max_gap, 0.0, response.size()});
      accept(std::move(response), std::move(response_fields), std::move(re));
      break;
    }
    if (n + 1 == config.max_iterations) {
      report.history.push_back(record);
      accept(std::move(q), std::move(fields), std::move(e));
      break;
    }
    record.lambda = DampingWeight(config, n + 1);
    report.history.push_back(record);
    q = TrajectoryEnsemble::Mix(q, response, record.lambda);
  }

  report.certification = Certify(report.exploitability, config.tol);
  try {
    report.m_infinity = LimitMeasure(domain, report.ensemble);
  } catch (const HorizonError&) {
    report.m_infinity = ParticleMeasure();
  }
  report.ledger = BuildLedger(game, m0, config, report);
  return report;
}

}  // namespace exitmfg
