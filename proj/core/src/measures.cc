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

#include "exitmfg/measures.h"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <map>
#include <random>
#include <string>
#include <utility>

#include "exitmfg/errors.h"

namespace exitmfg {
namespace {

// Neumaier summation; keeps unit-mass checks meaningful for 10^4 atoms.
class CompensatedSum {
 public:
  void Add(double v) {
    const double t = sum_ + v;
    if (std::abs(sum_) >= std::abs(v)) {
      carry_ += (sum_ - t) + v;
    } else {
      carry_ += (v - t) + sum_;
    }
    sum_ = t;
  }
  double value() const { return sum_ + carry_; }

 private:
  double sum_ = 0.0;
  double carry_ = 0.0;
};

std::uint64_t Fnv(std::uint64_t h, const void* data, std::size_t n) {
  const auto* bytes = static_cast<const unsigned char*>(data);
  for (std::size_t i = 0; i < n; ++i) {
    h ^= bytes[i];
    h *= 1099511628211ULL;
  }
  return h;
}

std::uint64_t HashTrajectory(const Trajectory& t) {
  std::uint64_t h = 1469598103934665603ULL;
  for (const Point& p : t.samples) {
    h = Fnv(h, &p.node, sizeof(p.node));
    h = Fnv(h, &p.next, sizeof(p.next));
    h = Fnv(h, &p.offset, sizeof(p.offset));
  }
  h = Fnv(h, &t.start_index, sizeof(t.start_index));
  const int exit = t.exit_index.value_or(-1);
  return Fnv(h, &exit, sizeof(exit));
}

ParticleMeasure EqualWeightAtoms(const std::vector<NodeId>& nodes) {
  std::vector<Atom> atoms;
  atoms.reserve(nodes.size());
  const double w = 1.0 / static_cast<double>(nodes.size());
  for (NodeId n : nodes) atoms.push_back({Point::At(n), w});
  return ParticleMeasure(std::move(atoms));
}

// Starting points that differ only by printed rounding of the offset.
bool SameStart(const Point& a, const Point& b) {
  return a.node == b.node && a.next == b.next &&
         std::abs(a.offset - b.offset) <= 1e-9 * std::max(1.0, a.offset);
}

}  // namespace

ParticleMeasure::ParticleMeasure(std::vector<Atom> atoms) {
  for (const Atom& a : atoms) {
    if (!std::isfinite(a.weight) || a.weight < 0.0) {
      throw PreconditionError("atom weights must be finite and nonnegative");
    }
  }
  std::stable_sort(atoms.begin(), atoms.end(),
                   [](const Atom& a, const Atom& b) {
                     return a.location < b.location;
                   });
  for (const Atom& a : atoms) {
    if (a.weight == 0.0) continue;
    if (!atoms_.empty() && atoms_.back().location == a.location) {
      atoms_.back().weight += a.weight;
    } else {
      atoms_.push_back(a);
    }
  }
}

ParticleMeasure ParticleMeasure::Dirac(const Point& p) {
  return ParticleMeasure({{p, 1.0}});
}

double ParticleMeasure::total_mass() const {
  CompensatedSum s;
  for (const Atom& a : atoms_) s.Add(a.weight);
  return s.value();
}

bool ParticleMeasure::IsNormalized(double tol) const {
  return std::abs(total_mass() - 1.0) <= tol;
}

void ParticleMeasure::RequireNormalized(const char* what) const {
  if (!IsNormalized()) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", total_mass());
    throw PreconditionError(std::string(what) +
                            " must have unit mass, got total weight " + buf);
  }
}

ParticleMeasure ParticleMeasure::Normalized() const {
  const double m = total_mass();
  if (!(m > 0.0)) throw PreconditionError("cannot normalize a zero measure");
  std::vector<Atom> atoms = atoms_;
  for (Atom& a : atoms) a.weight /= m;
  return ParticleMeasure(std::move(atoms));
}

bool operator==(const ParticleMeasure& a, const ParticleMeasure& b) {
  if (a.atoms_.size() != b.atoms_.size()) return false;
  for (std::size_t i = 0; i < a.atoms_.size(); ++i) {
    if (!(a.atoms_[i].location == b.atoms_[i].location) ||
        a.atoms_[i].weight != b.atoms_[i].weight) {
      return false;
    }
  }
  return true;
}

ParticleMeasure Pushforward(const SpatialDomain& domain,
                            const ParticleMeasure& mu, const PointMap& map) {
  std::vector<Atom> out;
  out.reserve(mu.size());
  for (const Atom& a : mu.atoms()) {
    const std::optional<Point> image = map(a.location);
    if (!image.has_value()) {
      throw PreconditionError("map is undefined at atom " +
                              domain.Describe(a.location));
    }
    out.push_back({domain.Canonical(*image), a.weight});
  }
  return ParticleMeasure(std::move(out));
}

double PMoment(const SpatialDomain& domain, const ParticleMeasure& mu,
               double p) {
  const Point origin = Point::At(domain.origin());
  CompensatedSum s;
  for (const Atom& a : mu.atoms()) {
    s.Add(a.weight * std::pow(domain.Distance(origin, a.location), p));
  }
  return s.value();
}

ParticleMeasure ProjectToNodes(const SpatialDomain& domain,
                               const ParticleMeasure& mu) {
  return Pushforward(domain, mu, [&](const Point& p) -> std::optional<Point> {
    if (p.AtNode()) return p;
    const double len = domain.EdgeLength(p.node, p.next);
    return Point::At(p.offset <= 0.5 * len ? p.node : p.next);
  });
}

double UniformDouble(std::uint64_t bits) {
  return static_cast<double>(bits >> 11) * 0x1.0p-53;
}

ParticleMeasure SampleFromDensity(const SpatialDomain& domain,
                                  std::span<const double> density, int n,
                                  SamplingMode mode, std::uint64_t seed) {
  if (density.size() != domain.node_count()) {
    throw PreconditionError("density must have one value per node");
  }
  if (n <= 0) throw PreconditionError("sample count must be positive");
  const std::size_t nodes = domain.node_count();
  std::vector<double> cumulative(nodes);
  double running = 0.0;
  for (std::size_t i = 0; i < nodes; ++i) {
    const double f = density[i];
    if (!std::isfinite(f) || f < 0.0) {
      throw PreconditionError("density values must be finite and nonnegative");
    }
    double cell = 1.0;
    if (domain.kind() == BackendKind::kInterval) {
      cell = 0.0;
      for (const Edge& e : domain.neighbors(static_cast<NodeId>(i))) {
        cell += 0.5 * e.length;
      }
    }
    running += f * cell;
    cumulative[i] = running;
  }
  const double total = running;
  if (!(total > 0.0)) {
    throw PreconditionError("density has zero total mass on the grid");
  }
  auto locate = [&](double level) {
    const auto it =
        std::lower_bound(cumulative.begin(), cumulative.end(), level);
    std::size_t idx = std::min<std::size_t>(it - cumulative.begin(),
                                            nodes - 1);
    while (idx > 0 && density[idx] == 0.0) --idx;
    while (density[idx] == 0.0) ++idx;
    return static_cast<NodeId>(idx);
  };
  std::vector<NodeId> picks;
  picks.reserve(n);
  if (mode == SamplingMode::kQuantile) {
    if (domain.kind() != BackendKind::kInterval) {
      throw PreconditionError(
          "quantile sampling requires the interval backend");
    }
    for (int k = 0; k < n; ++k) {
      picks.push_back(locate(total * (k + 0.5) / n));
    }
  } else {
    std::mt19937_64 rng(seed);
    for (int k = 0; k < n; ++k) {
      picks.push_back(locate(total * UniformDouble(rng())));
    }
  }
  return EqualWeightAtoms(picks);
}

ParticleMeasure SampleFromQuantileFunction(
    const SpatialDomain& domain, const std::function<double(double)>& quantile,
    int n, SamplingMode mode, std::uint64_t seed) {
  if (domain.kind() != BackendKind::kInterval) {
    throw PreconditionError(
        "quantile-function sampling requires the interval backend");
  }
  if (n <= 0) throw PreconditionError("sample count must be positive");
  std::vector<NodeId> picks;
  picks.reserve(n);
  std::mt19937_64 rng(seed);
  for (int k = 0; k < n; ++k) {
    const double u = mode == SamplingMode::kQuantile
                         ? (k + 0.5) / n
                         : UniformDouble(rng());
    const double x = quantile(u);
    if (!std::isfinite(x)) {
      throw PreconditionError("quantile function returned a non-finite value");
    }
    picks.push_back(domain.NearestNode({x, 0.0}));
  }
  return EqualWeightAtoms(picks);
}

int TimeGrid::IndexOf(double t) const {
  const double slack = 1e-9 * dt;
  if (!(t >= -slack) || t > horizon() + slack) {
    char buf[96];
    std::snprintf(buf, sizeof(buf), "time %.6g outside [0, %.6g]", t,
                  horizon());
    throw RangeError(buf);
  }
  const long j = std::lround(t / dt);
  return static_cast<int>(std::clamp(j, 0L, static_cast<long>(steps)));
}

void TrajectoryEnsemble::Add(Trajectory trajectory, double weight) {
  if (static_cast<int>(trajectory.samples.size()) != grid_.steps + 1) {
    throw PreconditionError("trajectory length does not match the time grid");
  }
  if (!std::isfinite(weight) || weight < 0.0) {
    throw PreconditionError("trajectory weight must be finite and nonnegative");
  }
  const std::uint64_t h = HashTrajectory(trajectory);
  const auto [lo, hi] = index_.equal_range(h);
  for (auto it = lo; it != hi; ++it) {
    if (members_[it->second].trajectory == trajectory) {
      members_[it->second].weight += weight;
      return;
    }
  }
  index_.emplace(h, members_.size());
  members_.push_back({std::move(trajectory), weight});
}

double TrajectoryEnsemble::total_weight() const {
  CompensatedSum s;
  for (const auto& m : members_) s.Add(m.weight);
  return s.value();
}

TrajectoryEnsemble TrajectoryEnsemble::Mix(const TrajectoryEnsemble& a,
                                           const TrajectoryEnsemble& b,
                                           double lambda, double prune) {
  if (!(a.grid_ == b.grid_)) {
    throw PreconditionError("cannot mix ensembles on different time grids");
  }
  if (!(lambda > 0.0) || lambda > 1.0) {
    throw PreconditionError("mixing weight must lie in (0, 1]");
  }
  TrajectoryEnsemble mixed(a.grid_);
  for (const auto& m : a.members_) {
    if (lambda < 1.0) mixed.Add(m.trajectory, (1.0 - lambda) * m.weight);
  }
  for (const auto& m : b.members_) mixed.Add(m.trajectory, lambda * m.weight);

  const ParticleMeasure initial = a.InitialMarginal();
  if (!(initial == b.InitialMarginal())) {
    TrajectoryEnsemble out(a.grid_);
    double kept = 0.0;
    for (const auto& m : mixed.members_) {
      if (m.weight >= prune) kept += m.weight;
    }
    if (!(kept > 0.0)) throw PreconditionError("mixture has no mass left");
    for (auto& m : mixed.members_) {
      if (m.weight >= prune) out.Add(std::move(m.trajectory), m.weight / kept);
    }
    return out;
  }

  return mixed.AnchoredTo(initial, prune);
}

TrajectoryEnsemble TrajectoryEnsemble::AnchoredTo(
    const ParticleMeasure& initial, double prune) const {
  const auto& atoms = initial.atoms();
  std::map<Point, std::size_t> exact;
  for (std::size_t g = 0; g < atoms.size(); ++g) exact[atoms[g].location] = g;
  std::vector<std::vector<std::size_t>> groups(initial.size());
  std::vector<std::size_t> group_of(members_.size(), 0);
  for (std::size_t i = 0; i < members_.size(); ++i) {
    const Point& start = members_[i].trajectory.samples[0];
    std::size_t g = 0;
    if (const auto it = exact.find(start); it != exact.end()) {
      g = it->second;
    } else {
      while (g < atoms.size() && !SameStart(atoms[g].location, start)) ++g;
    }
    if (g == atoms.size()) {
      throw PreconditionError("a member starts away from every atom");
    }
    groups[g].push_back(i);
    group_of[i] = g;
  }
  std::vector<double> weights(members_.size(), 0.0);
  std::vector<std::size_t> order;
  order.reserve(members_.size());
  for (std::size_t g = 0; g < groups.size(); ++g) {
    const Atom& atom = initial.atoms()[g];
    std::vector<std::size_t>& ids = groups[g];
    if (ids.empty()) throw PreconditionError("no member starts at an atom");
    double kept = 0.0;
    std::size_t largest = ids.front();
    for (std::size_t i : ids) {
      if (members_[i].weight >= prune) kept += members_[i].weight;
      if (members_[i].weight > members_[largest].weight) {
        largest = i;
      }
    }
    if (!(kept > 0.0)) {
      ids = {largest};
      kept = members_[largest].weight;
    }
    std::erase_if(ids, [&](std::size_t i) {
      return i != largest && members_[i].weight < prune;
    });
    // The largest member goes last and absorbs the rounding of the same
    // left-to-right sum the marginal uses.
    double sum = 0.0;
    for (std::size_t i : ids) {
      if (i == largest) continue;
      weights[i] = members_[i].weight / kept * atom.weight;
      sum += weights[i];
      order.push_back(i);
    }
    double rest = std::max(0.0, atom.weight - sum);
    for (int attempt = 0; attempt < 8 && sum + rest != atom.weight; ++attempt) {
      rest = std::nextafter(rest, sum + rest < atom.weight
                                      ? std::numeric_limits<double>::infinity()
                                      : 0.0);
    }
    weights[largest] = rest;
    order.push_back(largest);
  }
  TrajectoryEnsemble out(grid_);
  for (std::size_t i : order) {
    if (weights[i] > 0.0) {
      Trajectory t = members_[i].trajectory;
      std::fill(t.samples.begin(), t.samples.begin() + t.start_index + 1,
                initial.atoms()[group_of[i]].location);
      out.Add(std::move(t), weights[i]);
    }
  }
  return out;
}

ParticleMeasure TrajectoryEnsemble::MarginalAt(int index) const {
  if (index < 0 || index > grid_.steps) {
    throw RangeError("sample index outside the time grid");
  }
  std::vector<Atom> atoms;
  atoms.reserve(members_.size());
  for (const auto& m : members_) {
    atoms.push_back({m.trajectory.samples[index], m.weight});
  }
  return ParticleMeasure(std::move(atoms));
}

ParticleMeasure TrajectoryEnsemble::TimeMarginal(double t) const {
  return MarginalAt(grid_.IndexOf(t));
}

TrajectoryEnsemble StaticEnsemble(const ParticleMeasure& mu,
                                  const TimeGrid& grid) {
  TrajectoryEnsemble q(grid);
  for (const Atom& a : mu.atoms()) {
    Trajectory t;
    t.samples.assign(grid.steps + 1, a.location);
    q.Add(std::move(t), a.weight);
  }
  return q;
}

}  // namespace exitmfg
