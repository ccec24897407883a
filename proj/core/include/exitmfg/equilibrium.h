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

#ifndef EXITMFG_EQUILIBRIUM_H_
#define EXITMFG_EQUILIBRIUM_H_

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "exitmfg/congestion.h"
#include "exitmfg/domain.h"
#include "exitmfg/hypotheses.h"
#include "exitmfg/measures.h"
#include "exitmfg/ocp.h"

namespace exitmfg {

// The data of one exit game. Holds references; the referents must outlive it.
struct Game {
  const SpatialDomain& domain;
  const ExitCost& cost;
  const CongestionKernel& kernel;
};

enum class DampingRule { kFictitiousPlay, kConstant };

struct EquilibriumConfig {
  int max_iterations = 50;
  DampingRule damping = DampingRule::kFictitiousPlay;
  // Mixing weight for DampingRule::kConstant.
  double lambda = 0.5;
  double tol = 0.02;
  // Defaults to 4 (dt + dx) when unset.
  std::optional<double> tol_dpp;
  // Defaults to resolution / k_max when unset.
  std::optional<double> dt;
  // Radius R_max behind the horizon T(R_max) + 2 dt; defaults to the support
  // radius of m0.
  std::optional<double> horizon_radius;
  // Evaluate the speed field on node histograms of the marginals.
  bool binned_speed = false;
  // Radii R for the confinement-set check; empty means a default ladder.
  std::vector<double> confinement_radii;
  std::uint64_t seed = 0;

  // Throws PreconditionError on an invalid configuration.
  void Validate() const;
};

// Mixing weight used after `iteration` best responses have been averaged.
double DampingWeight(const EquilibriumConfig& config, int iteration);

// max over atoms of d(origin, x).
double SupportRadius(const SpatialDomain& domain, const ParticleMeasure& mu);

// Grid with dt from the config and horizon T(R_max) + 2 dt.
TimeGrid RunTimeGrid(const Game& game, const ParticleMeasure& m0,
                     const EquilibriumConfig& config);

// k_Q(t_j, x_i) = K(e_{t_j} # Q, x_i).
SpeedField InducedSpeedField(const Game& game, const TrajectoryEnsemble& q,
                             bool binned = false);

struct Fields {
  SpeedField speed;
  ValueField phi;
};

// Speed and value fields induced by q. `required_horizon` is forwarded to
// SolveValue.
Fields InducedFields(const Game& game, const TrajectoryEnsemble& q,
                     std::optional<double> required_horizon, bool binned);

// One optimal trajectory per atom of m0 for the given fields.
TrajectoryEnsemble BestResponseWithFields(const Game& game,
                                          const ParticleMeasure& m0,
                                          const Fields& fields);

TrajectoryEnsemble BestResponse(const Game& game, const ParticleMeasure& m0,
                                const TrajectoryEnsemble& q);

enum class AdmissibilityPolicy { kThrow, kRecord };

struct ExploitabilityReport {
  // sum_i w_i (cost(gamma_i) - phi(0, gamma_i(0))).
  double epsilon = 0.0;
  double max_gap = 0.0;
  double min_gap = 0.0;
  // Per member, in ensemble order.
  std::vector<double> gaps;
  int non_exiting = 0;
  bool admissible = true;
  double worst_excess = 0.0;
  int inadmissible_members = 0;
};

// Gaps of q's members measured against the given fields. Non-exiting members
// are charged `cost_cap`. Under kThrow an inadmissible member raises
// CertificationError.
ExploitabilityReport ExploitabilityAgainst(const Game& game,
                                           const TrajectoryEnsemble& q,
                                           const Fields& fields,
                                           double cost_cap,
                                           AdmissibilityPolicy policy);

// Exploitability of q under its own induced fields.
ExploitabilityReport Exploitability(const Game& game,
                                    const TrajectoryEnsemble& q,
                                    double cost_cap,
                                    AdmissibilityPolicy policy,
                                    bool binned = false);

struct Certification {
  bool weak = false;
  bool strong = false;
  double epsilon = 0.0;
  double max_gap = 0.0;
  std::string details;
};

Certification Certify(const ExploitabilityReport& report, double tol);
Certification Certify(const Game& game, const TrajectoryEnsemble& q,
                      double tol, double cost_cap);

struct IterationRecord {
  int iteration = 0;
  double epsilon = 0.0;
  double max_gap = 0.0;
  // Weight given to the new best response; 0 on the last record.
  double lambda = 0.0;
  std::size_t members = 0;
};

struct EquilibriumReport {
  TimeGrid grid;
  TrajectoryEnsemble ensemble;
  Fields fields;
  ExploitabilityReport exploitability;
  Certification certification;
  std::vector<IterationRecord> history;
  bool converged = false;
  // True when the final ensemble is a single best response that passed
  // certification under its own fields.
  bool purified = false;
  ParticleMeasure m_infinity;
  CheckLedger ledger;

  double tol = 0.0;
  double tol_dpp = 0.0;
  double support_radius = 0.0;
  // T(R_max) and psi(R_max).
  double horizon_bound = 0.0;
  double trajectory_bound = 0.0;
  double cost_cap = 0.0;
  std::string selection_rules;
};

// Checks recorded on a candidate equilibrium: initial marginal, value and
// trajectory bounds, confinement set, dynamic programming residuals,
// exploitability sign, admissibility, exits, weak/strong agreement and the
// limit measure.
CheckLedger BuildLedger(const Game& game, const ParticleMeasure& m0,
                        const EquilibriumConfig& config,
                        const EquilibriumReport& report);

// Damped best-response iteration from the best response to the static
// ensemble. Non-convergence is reported, not thrown. Throws HypothesisError
// when the domain or kernel checks fail.
EquilibriumReport SolveEquilibrium(const Game& game, const ParticleMeasure& m0,
                                   const EquilibriumConfig& config);

}  // namespace exitmfg

#endif  // EXITMFG_EQUILIBRIUM_H_
