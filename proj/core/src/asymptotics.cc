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

#include "exitmfg/asymptotics.h"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <utility>

#include "exitmfg/errors.h"
#include "exitmfg/wasserstein.h"

namespace exitmfg {
namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

// Fits y = a + b x by least squares; returns (b, rms residual).
std::pair<double, double> LinearFit(const std::vector<double>& x,
                                    const std::vector<double>& y) {
  const double n = static_cast<double>(x.size());
  double mx = 0.0;
  double my = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= n;
  my /= n;
  double sxx = 0.0;
  double sxy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
  }
  if (!(sxx > 0.0)) throw RangeError("fit window has no spread in t");
  const double slope = sxy / sxx;
  double ss = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double r = y[i] - (my + slope * (x[i] - mx));
    ss += r * r;
  }
  return {slope, std::sqrt(ss / n)};
}

}  // namespace

ParticleMeasure LimitMeasure(const SpatialDomain& domain,
                             const TrajectoryEnsemble& q) {
  const int last = q.grid().steps;
  std::vector<Atom> atoms;
  atoms.reserve(q.size());
  for (std::size_t i = 0; i < q.size(); ++i) {
    const WeightedTrajectory& m = q.members()[i];
    const auto& s = m.trajectory.samples;
    for (int k = 1; k <= 2 && last - k >= 0; ++k) {
      if (!(s[last - k] == s[last])) {
        throw HorizonError("horizon too short for e_infinity: trajectory " +
                           std::to_string(i) + " from " +
                           domain.Describe(s[m.trajectory.start_index]) +
                           " still moves near the horizon");
      }
    }
    atoms.push_back({s[last], m.weight});
  }
  return ParticleMeasure(std::move(atoms));
}

ConvergenceCurve ComputeConvergenceCurve(const SpatialDomain& domain,
                                         const TrajectoryEnsemble& q,
                                         const std::vector<double>& times,
                                         int p) {
  ConvergenceCurve curve;
  curve.p = p;
  ParticleMeasure limit = LimitMeasure(domain, q);
  const bool exact_1d = domain.kind() == BackendKind::kInterval;
  if (!exact_1d && limit.size() > kMaxExactSupport) {
    limit = ProjectToNodes(domain, limit);
    curve.projected = true;
  }
  for (double t : times) {
    ParticleMeasure mt = q.TimeMarginal(t);
    if (!exact_1d && mt.size() > kMaxExactSupport) {
      mt = ProjectToNodes(domain, mt);
      curve.projected = true;
    }
    curve.times.push_back(t);
    curve.values.push_back(Wasserstein(domain, mt, limit, p));
    curve.bounds.push_back(kNaN);
  }
  return curve;
}

BoundConstants DeriveBoundConstants(const SpatialDomain& domain,
                                    const ExitCost& cost, double k_min,
                                    double k_max) {
  BoundConstants c;
  c.k_min = k_min;
  c.k_max = k_max;
  c.alpha = k_min / domain.geodesic_constant();
  c.t0 = HorizonBound(domain, cost, k_min, 0.0);
  return c;
}

double TailBound(const SpatialDomain& domain, const ParticleMeasure& m0,
                 const BoundConstants& constants, double t, int p) {
  if (t < constants.t0 - 1e-12) {
    char buf[96];
    std::snprintf(buf, sizeof(buf), "tail bound needs t >= t0 = %.6g (got %.6g)",
                  constants.t0, t);
    throw RangeError(buf);
  }
  const double radius = constants.alpha * std::max(0.0, t - constants.t0);
  const Point origin = Point::At(domain.origin());
  double sum = 0.0;
  for (const Atom& a : m0.atoms()) {
    const double d = domain.Distance(origin, a.location);
    if (d > radius) {
      const double psi =
          constants.k_max * (constants.t0 + d / constants.alpha) + d;
      sum += a.weight * std::pow(psi, p);
    }
  }
  return std::pow(2.0, p) * sum;
}

void AttachTailBound(const SpatialDomain& domain, const ParticleMeasure& m0,
                     const BoundConstants& constants,
                     ConvergenceCurve* curve) {
  for (std::size_t i = 0; i < curve->times.size(); ++i) {
    const double t = curve->times[i];
    curve->bounds[i] = t >= constants.t0
                           ? TailBound(domain, m0, constants, t, curve->p)
                           : kNaN;
  }
}

std::optional<double> SettlingTime(const TrajectoryEnsemble& q) {
  const int last = q.grid().steps;
  int settle = 0;
  for (const auto& m : q.members()) {
    const auto& s = m.trajectory.samples;
    for (int j = last; j > settle; --j) {
      if (!(s[j] == s[j - 1])) {
        settle = j;
        break;
      }
    }
  }
  if (settle == last && last > 0) return std::nullopt;
  return q.grid().TimeAt(settle);
}

RateFit FitDecayRate(const ConvergenceCurve& curve, double t_lo, double t_hi,
                     FitMode mode, int dimension) {
  RateFit fit;
  fit.mode = mode;
  fit.t_lo = t_lo;
  fit.t_hi = t_hi;
  std::vector<double> xs;
  std::vector<double> ys;
  const double p = curve.p;
  for (std::size_t i = 0; i < curve.times.size(); ++i) {
    const double t = curve.times[i];
    if (t < t_lo || t > t_hi) continue;
    const double wp = std::pow(curve.values[i], p);
    if (!(wp > 0.0) || !(t > 0.0)) {
      char buf[128];
      std::snprintf(buf, sizeof(buf),
                    "curve is not positive at t = %.6g; shrink the fit window",
                    t);
      throw RangeError(buf);
    }
    if (mode == FitMode::kPower) {
      xs.push_back(std::log(t));
      ys.push_back(std::log(wp));
    } else {
      xs.push_back(t);
      ys.push_back(std::log(wp) - (p + dimension - 1.0) * std::log(t));
    }
  }
  if (xs.size() < 2) {
    throw RangeError("fewer than two curve samples in the fit window");
  }
  const auto [slope, residual] = LinearFit(xs, ys);
  fit.exponent = slope;
  fit.rate = mode == FitMode::kExponential ? -slope : 0.0;
  fit.residual = residual;
  fit.points = static_cast<int>(xs.size());
  return fit;
}

StabilityReport StabilitySweep(const Game& game, const ParticleMeasure& base_m0,
                               const std::vector<FamilyMember>& family,
                               const EquilibriumConfig& config) {
  const SpatialDomain& domain = game.domain;
  EquilibriumConfig cfg = config;
  double radius = SupportRadius(domain, base_m0);
  for (const FamilyMember& f : family) {
    radius = std::max(radius, SupportRadius(domain, f.m0));
  }
  cfg.horizon_radius = std::max(config.horizon_radius.value_or(0.0), radius);

  StabilityReport report;
  report.base_m0 = base_m0;
  const EquilibriumReport base = SolveEquilibrium(game, base_m0, cfg);
  report.base_converged = base.converged;
  if (!base.m_infinity.empty()) report.base_limits.push_back(base.m_infinity);

  std::vector<double> own_threshold;
  for (const FamilyMember& f : family) {
    StabilityMember m;
    m.label = f.label;
    m.parameter = f.parameter;
    m.m0 = f.m0;
    try {
      m.w1_to_base = Wasserstein(domain, f.m0, base_m0, 1);
      const EquilibriumReport r = SolveEquilibrium(game, f.m0, cfg);
      m.solved = true;
      m.converged = r.converged;
      m.epsilon = r.exploitability.epsilon;
      m.m_infinity = r.m_infinity;
      m.limit_distance = std::numeric_limits<double>::infinity();
      if (!m.m_infinity.empty()) {
        for (const ParticleMeasure& l : report.base_limits) {
          m.limit_distance = std::min(m.limit_distance,
                                      Wasserstein(domain, m.m_infinity, l, 1));
        }
      }
      m.cross_exploitability =
          ExploitabilityAgainst(game, r.ensemble, base.fields, base.cost_cap,
                                AdmissibilityPolicy::kRecord)
              .epsilon;
      own_threshold.push_back(r.tol + r.tol_dpp);
    } catch (const Error& e) {
      m.solved = false;
      m.error = e.what();
      own_threshold.push_back(0.0);
    }
    report.members.push_back(std::move(m));
  }

  for (std::size_t i = 0; i < report.members.size(); ++i) {
    const StabilityMember& m = report.members[i];
    if (!m.solved) continue;
    if (report.probe_member < 0 ||
        m.w1_to_base < report.members[report.probe_member].w1_to_base) {
      report.probe_member = static_cast<int>(i);
    }
  }
  if (report.probe_member >= 0) {
    const StabilityMember& m = report.members[report.probe_member];
    report.probe_w1 = m.w1_to_base;
    report.probe_epsilon = m.epsilon;
    report.probe_threshold = own_threshold[report.probe_member];
    report.probe_passed = m.epsilon <= report.probe_threshold;
  }
  return report;
}

}  // namespace exitmfg
