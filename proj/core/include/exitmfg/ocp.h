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

#ifndef EXITMFG_OCP_H_
#define EXITMFG_OCP_H_

#include <cstdint>
#include <limits>
#include <optional>
#include <span>
#include <vector>

#include "exitmfg/domain.h"
#include "exitmfg/measures.h"

namespace exitmfg {

// Dense array of nodal values on a space-time grid, slice-major.
class SpaceTimeField {
 public:
  SpaceTimeField() = default;
  SpaceTimeField(TimeGrid grid, std::size_t nodes, double fill = 0.0);

  const TimeGrid& grid() const { return grid_; }
  std::size_t nodes() const { return nodes_; }

  double& at(int j, NodeId x) { return values_[Offset(j, x)]; }
  double at(int j, NodeId x) const { return values_[Offset(j, x)]; }
  std::span<const double> slice(int j) const;
  std::span<double> mutable_slice(int j);
  // Edge-linear interpolation within slice j.
  double At(const SpatialDomain& domain, int j, const Point& p) const;

 private:
  std::size_t Offset(int j, NodeId x) const {
    return static_cast<std::size_t>(j) * nodes_ + static_cast<std::size_t>(x);
  }

  TimeGrid grid_;
  std::size_t nodes_ = 0;
  std::vector<double> values_;
};

// Speed cap k(t_j, x_i) together with the bounds it must respect.
class SpeedField : public SpaceTimeField {
 public:
  SpeedField() = default;
  SpeedField(TimeGrid grid, std::size_t nodes, double k_min, double k_max);
  static SpeedField Constant(TimeGrid grid, std::size_t nodes, double k);

  double k_min() const { return k_min_; }
  double k_max() const { return k_max_; }
  // Throws PreconditionError when a value leaves [k_min, k_max].
  void Validate() const;

 private:
  double k_min_ = 0.0;
  double k_max_ = 0.0;
};

// Value function phi(t_j, x_i).
class ValueField : public SpaceTimeField {
 public:
  using SpaceTimeField::SpaceTimeField;
};

struct SolveOptions {
  // When set, the grid horizon must be at least this long.
  std::optional<double> required_horizon;
};

// Backward semi-Lagrangian dynamic programming. The terminal slice is the
// stationary minimal-time value under the frozen final speed slice.
ValueField SolveValue(const SpatialDomain& domain, const ExitCost& cost,
                      const SpeedField& speed, const SolveOptions& options = {});

// Greedy descent of phi from (t_{start_index}, x0); constant before the start
// and after the exit.
Trajectory SynthesizeOptimal(const SpatialDomain& domain,
                             const ExitCost& cost, const ValueField& phi,
                             const SpeedField& speed, int start_index,
                             const Point& x0);

inline constexpr double kNoExit = std::numeric_limits<double>::infinity();

// Index of the first sample at or after the start that snaps into the target.
std::optional<int> FindExitIndex(const SpatialDomain& domain,
                                 const Trajectory& traj);
// Exit time relative to the start, or kNoExit.
double FirstExitTime(const SpatialDomain& domain, const Trajectory& traj,
                     const TimeGrid& grid);
// g at the snapped exit node, or kNoExit.
double FinalCost(const SpatialDomain& domain, const Trajectory& traj,
                 const ExitCost& cost);
double RealizedCost(const SpatialDomain& domain, const Trajectory& traj,
                    const TimeGrid& grid, const ExitCost& cost);

struct AdmissibilityReport {
  bool admissible = true;
  // Largest displacement minus allowance (negative when slack remains).
  double worst_excess = -std::numeric_limits<double>::infinity();
  int worst_step = -1;
};

AdmissibilityReport IsAdmissible(const SpatialDomain& domain,
                                 const Trajectory& traj,
                                 const SpeedField& speed, double slack);

// T(R) = G_0 + D d(0, y_0) / k_min + D R / k_min with y_0 the target nearest
// the origin.
double HorizonBound(const SpatialDomain& domain, const ExitCost& cost,
                    double k_min, double radius);
// psi(R) = k_max T(R) + R.
double TrajectoryBound(double horizon_bound, double k_max, double radius);

struct DppReport {
  // min over h of min(0, phi(t0 + h, gamma(t0 + h)) + h - phi(t0, x0)).
  double inequality_residual = 0.0;
  // max over h of |phi(t0 + h, gamma(t0 + h)) + h - phi(t0, x0)|.
  double equality_residual = 0.0;
  int samples = 0;
};

// Scans h over the grid from the trajectory start up to its exit (or the
// horizon when it never exits).
DppReport CheckDpp(const SpatialDomain& domain, const ValueField& phi,
                   const Trajectory& traj);

struct RegularityReport {
  double spatial_lipschitz_ratio = 0.0;
  // min of (phi(t0, x) - phi(t1, x)) / (t0 - t1); must stay above -1.
  double min_time_quotient = 0.0;
  int pairs = 0;
  bool time_floor_holds = true;
};

RegularityReport CheckValueRegularity(const SpatialDomain& domain,
                                      const ValueField& phi, double radius,
                                      int samples, std::uint64_t seed);

// 4 (dt + dx).
double DefaultTolDpp(const TimeGrid& grid, const SpatialDomain& domain);

// dt = resolution / k_max, enough steps to cover `horizon`.
TimeGrid DefaultTimeGrid(const SpatialDomain& domain, double k_max,
                         double horizon);

}  // namespace exitmfg

#endif  // EXITMFG_OCP_H_
