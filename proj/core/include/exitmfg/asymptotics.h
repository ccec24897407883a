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

#ifndef EXITMFG_ASYMPTOTICS_H_
#define EXITMFG_ASYMPTOTICS_H_

#include <optional>
#include <string>
#include <vector>

#include "exitmfg/domain.h"
#include "exitmfg/equilibrium.h"
#include "exitmfg/measures.h"

namespace exitmfg {

// e_infinity # Q, read off the last sample once every trajectory has been
// constant over its final two steps. Throws HorizonError naming the first
// trajectory that has not settled.
ParticleMeasure LimitMeasure(const SpatialDomain& domain,
                             const TrajectoryEnsemble& q);

struct ConvergenceCurve {
  int p = 1;
  std::vector<double> times;
  // W_p(m_t, m_infinity).
  std::vector<double> values;
  // Tail bound on W_p^p at the same times; NaN where it is undefined.
  std::vector<double> bounds;
  // True when a marginal was projected to nodes to fit the exact solver.
  bool projected = false;
};

ConvergenceCurve ComputeConvergenceCurve(const SpatialDomain& domain,
                                         const TrajectoryEnsemble& q,
                                         const std::vector<double>& times,
                                         int p);

// Linear majorant T(R) <= R / alpha + t0 of the horizon bound:
// alpha = k_min / D and t0 = G_0 + D d(0, y_0) / k_min.
struct BoundConstants {
  double alpha = 0.0;
  double t0 = 0.0;
  double k_min = 0.0;
  double k_max = 0.0;
};

BoundConstants DeriveBoundConstants(const SpatialDomain& domain,
                                    const ExitCost& cost, double k_min,
                                    double k_max);

// 2^p sum over atoms with d(0, x) > alpha (t - t0) of w psi(d(0, x))^p, with
// psi(R) = k_max (t0 + R / alpha) + R. Throws RangeError for t < t0.
double TailBound(const SpatialDomain& domain, const ParticleMeasure& m0,
                 const BoundConstants& constants, double t, int p);

// Fills curve.bounds at every sample with t >= t0.
void AttachTailBound(const SpatialDomain& domain, const ParticleMeasure& m0,
                     const BoundConstants& constants, ConvergenceCurve* curve);

// Smallest grid time after which every trajectory is constant; nullopt when
// some trajectory still moves on the last step.
std::optional<double> SettlingTime(const TrajectoryEnsemble& q);

enum class FitMode { kPower, kExponential };

struct RateFit {
  FitMode mode = FitMode::kPower;
  // Slope of log W^p against log t (power mode).
  double exponent = 0.0;
  // -slope of log(W^p / t^(p + d - 1)) against t (exponential mode).
  double rate = 0.0;
  // Root mean square residual of the linear fit.
  double residual = 0.0;
  double t_lo = 0.0;
  double t_hi = 0.0;
  int points = 0;
};

// Least-squares decay fit over the curve samples with t in [t_lo, t_hi].
// Throws RangeError when a sample in the window is not positive or fewer
// than two samples remain.
RateFit FitDecayRate(const ConvergenceCurve& curve, double t_lo, double t_hi,
                     FitMode mode, int dimension);

struct StabilityMember {
  std::string label;
  double parameter = 0.0;
  ParticleMeasure m0;
  double w1_to_base = 0.0;
  bool solved = false;
  std::string error;
  bool converged = false;
  double epsilon = 0.0;
  ParticleMeasure m_infinity;
  // W_1 from m_infinity to the nearest recorded base limit.
  double limit_distance = 0.0;
  // Exploitability of the member's ensemble under the base fields.
  double cross_exploitability = 0.0;
};

struct StabilityReport {
  ParticleMeasure base_m0;
  bool base_converged = false;
  std::vector<ParticleMeasure> base_limits;
  std::vector<StabilityMember> members;
  // Closed-graph probe on the member whose m0 is nearest the base.
  int probe_member = -1;
  double probe_w1 = 0.0;
  double probe_epsilon = 0.0;
  double probe_threshold = 0.0;
  bool probe_passed = false;
};

struct FamilyMember {
  std::string label;
  double parameter = 0.0;
  ParticleMeasure m0;
};

// Solves the base game and every member; member failures are recorded and
// the sweep continues.
StabilityReport StabilitySweep(const Game& game, const ParticleMeasure& base_m0,
                               const std::vector<FamilyMember>& family,
                               const EquilibriumConfig& config);

}  // namespace exitmfg

#endif  // EXITMFG_ASYMPTOTICS_H_
