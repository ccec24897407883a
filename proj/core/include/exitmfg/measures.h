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

#ifndef EXITMFG_MEASURES_H_
#define EXITMFG_MEASURES_H_

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <unordered_map>
#include <vector>

#include "exitmfg/domain.h"

namespace exitmfg {

struct Atom {
  Point location;
  double weight = 0.0;
};

// Finite weighted sum of Dirac masses. Atoms are kept sorted by location and
// coinciding atoms are merged; zero-weight atoms are dropped.
class ParticleMeasure {
 public:
  ParticleMeasure() = default;
  explicit ParticleMeasure(std::vector<Atom> atoms);

  static ParticleMeasure Dirac(const Point& p);

  const std::vector<Atom>& atoms() const { return atoms_; }
  std::size_t size() const { return atoms_.size(); }
  bool empty() const { return atoms_.empty(); }

  double total_mass() const;
  bool IsNormalized(double tol = 1e-12) const;
  // Throws PreconditionError naming `what` when the mass is not 1.
  void RequireNormalized(const char* what) const;
  ParticleMeasure Normalized() const;

  friend bool operator==(const ParticleMeasure& a, const ParticleMeasure& b);

 private:
  std::vector<Atom> atoms_;
};

// Map applied by Pushforward; nullopt marks points outside its domain.
using PointMap = std::function<std::optional<Point>(const Point&)>;

ParticleMeasure Pushforward(const SpatialDomain& domain,
                            const ParticleMeasure& mu, const PointMap& map);

// Sum of w_i d(origin, x_i)^p.
double PMoment(const SpatialDomain& domain, const ParticleMeasure& mu,
               double p);

// Moves every atom to its closest node (ties go to the lower id).
ParticleMeasure ProjectToNodes(const SpatialDomain& domain,
                               const ParticleMeasure& mu);

enum class SamplingMode { kQuantile, kIid };

// Quantizes a density given by nodal values, read as piecewise constant on
// node-centred cells clipped to the domain. Quantile mode places equal-weight
// atoms at the nodes whose cells contain the levels (i + 1/2)/n and is only
// available on the interval backend; iid mode draws n samples with the given
// seed.
ParticleMeasure SampleFromDensity(const SpatialDomain& domain,
                                  std::span<const double> density, int n,
                                  SamplingMode mode, std::uint64_t seed);

// Quantizes a law on the interval backend given by its quantile function
// (inverse CDF); samples are snapped to the nearest node.
ParticleMeasure SampleFromQuantileFunction(
    const SpatialDomain& domain, const std::function<double(double)>& quantile,
    int n, SamplingMode mode, std::uint64_t seed);

// Uniform double in [0, 1) from a 64-bit engine, identical on every platform.
double UniformDouble(std::uint64_t bits);

// Uniform time grid t_j = j * dt, j = 0..steps.
struct TimeGrid {
  double dt = 0.0;
  int steps = 0;

  double horizon() const { return dt * steps; }
  double TimeAt(int j) const { return dt * j; }
  // Nearest sample index; RangeError outside [0, horizon].
  int IndexOf(double t) const;
  friend bool operator==(const TimeGrid&, const TimeGrid&) = default;
};

// Timed path sampled on a TimeGrid: samples[j] = gamma(t_j).
struct Trajectory {
  std::vector<Point> samples;
  int start_index = 0;
  std::optional<int> exit_index;

  friend bool operator==(const Trajectory&, const Trajectory&) = default;
};

struct WeightedTrajectory {
  Trajectory trajectory;
  double weight = 0.0;
};

// Finite weighted family of trajectories on a common time grid.
class TrajectoryEnsemble {
 public:
  TrajectoryEnsemble() = default;
  explicit TrajectoryEnsemble(TimeGrid grid) : grid_(grid) {}

  const TimeGrid& grid() const { return grid_; }
  const std::vector<WeightedTrajectory>& members() const { return members_; }
  std::size_t size() const { return members_.size(); }

  // Appends a trajectory; identical trajectories are merged.
  void Add(Trajectory trajectory, double weight);
  double total_weight() const;

  // (1 - lambda) * a + lambda * b, pruned below `prune` and renormalized.
  static TrajectoryEnsemble Mix(const TrajectoryEnsemble& a,
                                const TrajectoryEnsemble& b, double lambda,
                                double prune = 1e-9);

  // Prunes members below `prune` and rescales the rest per starting atom so
  // the initial marginal equals `initial` exactly.
  TrajectoryEnsemble AnchoredTo(const ParticleMeasure& initial,
                                double prune = 0.0) const;

  ParticleMeasure MarginalAt(int index) const;
  ParticleMeasure TimeMarginal(double t) const;
  ParticleMeasure InitialMarginal() const { return MarginalAt(0); }

 private:
  TimeGrid grid_;
  std::vector<WeightedTrajectory> members_;
  std::unordered_multimap<std::uint64_t, std::size_t> index_;
};

// Constant trajectories sitting on the atoms of mu.
TrajectoryEnsemble StaticEnsemble(const ParticleMeasure& mu,
                                  const TimeGrid& grid);

}  // namespace exitmfg

#endif  // EXITMFG_MEASURES_H_
