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

#include "exitmfg/ocp.h"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <queue>
#include <random>
#include <string>
#include <utility>

#include "exitmfg/errors.h"

namespace exitmfg {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kStationaryTol = 1e-10;
constexpr int kMaxStationarySweeps = 100000;

std::string Num(double v) {
  char buf[48];
  std::snprintf(buf, sizeof(buf), "%.6g", v);
  return buf;
}

// A decision available at a node: move to `to`, covering `travel`, either
// along an edge or as a single-step jump inside the reachable ball.
struct Option {
  NodeId to;
  double travel;
  bool edge;
};

// Candidate destinations per node. Edges are always candidates; when one step
// can span more than the shortest edge, every node within k_max dt is too.
class Reach {
 public:
  Reach(const SpatialDomain& domain, double radius) : domain_(domain) {
    if (!(radius > domain.resolution() * (1.0 + 1e-9))) return;
    ball_.resize(domain.node_count());
    for (std::size_t x = 0; x < ball_.size(); ++x) {
      const NodeId id = static_cast<NodeId>(x);
      for (NodeId y : domain.Ball(id, radius)) {
        if (y == id || IsNeighbor(id, y)) continue;
        ball_[x].push_back({y, domain.Distance(id, y)});
      }
    }
  }

  void Options(NodeId x, double k, double dt, std::vector<Option>* out) const {
    out->clear();
    const double limit = k * dt * (1.0 + 1e-12);
    for (const Edge& e : domain_.neighbors(x)) {
      out->push_back({e.to, e.length, true});
    }
    if (ball_.empty()) return;
    for (const Edge& e : ball_[x]) {
      if (e.length <= limit) out->push_back({e.to, e.length, false});
    }
  }

  // Nodes that may reach u in one decision.
  template <typename F>
  void Predecessors(NodeId u, F&& visit) const {
    for (const Edge& e : domain_.neighbors(u)) visit(e.to, e.length, true);
    if (ball_.empty()) return;
    for (const Edge& e : ball_[u]) visit(e.to, e.length, false);
  }

 private:
  bool IsNeighbor(NodeId x, NodeId y) const {
    for (const Edge& e : domain_.neighbors(x)) {
      if (e.to == y) return true;
    }
    return false;
  }

  const SpatialDomain& domain_;
  std::vector<std::vector<Edge>> ball_;
};

// Phi at an arbitrary time: linear between slices, frozen past the horizon.
double ValueAtTime(const ValueField& phi, double t, NodeId y) {
  const TimeGrid& grid = phi.grid();
  const double s = t / grid.dt;
  if (s >= grid.steps - 1e-9) return phi.at(grid.steps, y);
  const int i = static_cast<int>(std::floor(s + 1e-9));
  const double f = s - i;
  const double lo = phi.at(i, y);
  if (f <= 1e-9) return lo;
  const double hi = phi.at(i + 1, y);
  if (!std::isfinite(lo) || !std::isfinite(hi)) return kInf;
  return (1.0 - f) * lo + f * hi;
}

double SpeedAtTime(const SpeedField& speed, double t, NodeId x) {
  const TimeGrid& grid = speed.grid();
  const double s = t / grid.dt;
  if (s >= grid.steps - 1e-9) return speed.at(grid.steps, x);
  const int i = static_cast<int>(std::floor(s + 1e-9));
  const double f = s - i;
  if (f <= 1e-9) return speed.at(i, x);
  return (1.0 - f) * speed.at(i, x) + f * speed.at(i + 1, x);
}

// Time to cover `length` from a node with speed k: one step when the step
// reaches that far, length / k otherwise.
double Duration(double length, double k, double dt) {
  return length <= k * dt * (1.0 + 1e-12) ? dt : length / k;
}

struct Choice {
  NodeId to = kNoNode;
  double travel = 0.0;
  double duration = 0.0;
  double value = kInf;
  bool edge = false;
};

// Best decision at node x at time t; `next_grid` is the time of the next
// slice. Staying put comes first, then shorter moves, then lower ids.
template <typename Value>
Choice Decide(const Reach& reach, NodeId x, double t, double next_grid,
              double k, double dt, std::vector<Option>* options,
              const Value& value) {
  Choice best;
  best.to = x;
  best.duration = next_grid - t;
  best.value = best.duration + value(next_grid, x);
  reach.Options(x, k, dt, options);
  for (const Option& o : *options) {
    const double d = Duration(o.travel, k, dt);
    const double v = d + value(t + d, o.to);
    const double tie =
        1e-12 * std::max(1.0, std::isfinite(best.value) ? std::abs(best.value)
                                                        : 1.0);
    if (v < best.value - tie ||
        (std::abs(v - best.value) <= tie && o.travel < best.travel)) {
      best = {o.to, o.travel, d, v, o.edge};
    }
  }
  return best;
}

void SolveStationary(const SpatialDomain& domain, const ExitCost& cost,
                     std::span<const double> speed, double dt,
                     const Reach& reach, ValueField* phi) {
  const std::size_t n = domain.node_count();
  const int last = phi->grid().steps;
  std::span<double> out = phi->mutable_slice(last);
  std::fill(out.begin(), out.end(), kInf);
  using Item = std::pair<double, NodeId>;
  std::priority_queue<Item, std::vector<Item>, std::greater<Item>> queue;
  for (NodeId t : domain.targets()) {
    out[t] = cost(t);
    queue.push({out[t], t});
  }
  while (!queue.empty()) {
    const auto [d, u] = queue.top();
    queue.pop();
    if (d > out[u]) continue;
    reach.Predecessors(u, [&](NodeId x, double length, bool edge) {
      if (domain.IsTarget(x)) return;
      const double k = speed[x];
      if (!edge && length > k * dt * (1.0 + 1e-12)) return;
      const double cand = d + Duration(length, k, dt);
      if (cand < out[x]) {
        out[x] = cand;
        queue.push({cand, x});
      }
    });
  }
  // The graph solve is the fixed point of the stationary scheme; the sweep
  // guards that claim.
  std::vector<double> updated(out.begin(), out.end());
  std::vector<Option> options;
  auto frozen = [&](double, NodeId y) { return out[y]; };
  for (int sweep = 0; sweep < kMaxStationarySweeps; ++sweep) {
    bool changed = false;
    for (std::size_t x = 0; x < n; ++x) {
      const NodeId id = static_cast<NodeId>(x);
      updated[x] = out[x];
      if (domain.IsTarget(id)) continue;
      const double v =
          Decide(reach, id, 0.0, dt, speed[x], dt, &options, frozen).value;
      const bool both_inf = !std::isfinite(v) && !std::isfinite(out[x]);
      if (!both_inf && !(std::abs(v - out[x]) <= kStationaryTol)) {
        updated[x] = v;
        changed = true;
      }
    }
    if (!changed) return;
    std::copy(updated.begin(), updated.end(), out.begin());
  }
  throw Error("stationary terminal solve did not reach a fixed point");
}

}  // namespace

SpaceTimeField::SpaceTimeField(TimeGrid grid, std::size_t nodes, double fill)
    : grid_(grid),
      nodes_(nodes),
      values_(static_cast<std::size_t>(grid.steps + 1) * nodes, fill) {
  if (!(grid.dt > 0.0) || grid.steps < 0) {
    throw PreconditionError("time grid needs dt > 0 and steps >= 0");
  }
}

std::span<const double> SpaceTimeField::slice(int j) const {
  if (j < 0 || j > grid_.steps) throw RangeError("time index out of range");
  return {values_.data() + Offset(j, 0), nodes_};
}

std::span<double> SpaceTimeField::mutable_slice(int j) {
  if (j < 0 || j > grid_.steps) throw RangeError("time index out of range");
  return {values_.data() + Offset(j, 0), nodes_};
}

double SpaceTimeField::At(const SpatialDomain& domain, int j,
                          const Point& p) const {
  return domain.Interpolate(slice(j), p);
}

SpeedField::SpeedField(TimeGrid grid, std::size_t nodes, double k_min,
                       double k_max)
    : SpaceTimeField(grid, nodes, k_max), k_min_(k_min), k_max_(k_max) {
  if (!(k_min > 0.0) || !(k_max >= k_min) || !std::isfinite(k_max)) {
    throw PreconditionError("speed bounds need 0 < k_min <= k_max < inf");
  }
}

SpeedField SpeedField::Constant(TimeGrid grid, std::size_t nodes, double k) {
  return SpeedField(grid, nodes, k, k);
}

void SpeedField::Validate() const {
  const double lo = k_min_ * (1.0 - 1e-12);
  const double hi = k_max_ * (1.0 + 1e-12);
  for (int j = 0; j <= grid().steps; ++j) {
    for (double v : slice(j)) {
      if (!(v >= lo && v <= hi)) {
        throw PreconditionError("speed value " + Num(v) + " outside [" +
                                Num(k_min_) + ", " + Num(k_max_) + "]");
      }
    }
  }
}

ValueField SolveValue(const SpatialDomain& domain, const ExitCost& cost,
                      const SpeedField& speed, const SolveOptions& options) {
  const std::size_t n = domain.node_count();
  if (speed.nodes() != n || cost.values().size() != n) {
    throw PreconditionError("speed field or exit cost does not match domain");
  }
  if (!(cost.lipschitz() * speed.k_max() < 1.0)) {
    throw HypothesisError("smallness condition fails: L_g * k_max = " +
                          Num(cost.lipschitz() * speed.k_max()) + " >= 1");
  }
  const TimeGrid& grid = speed.grid();
  if (options.required_horizon.has_value() &&
      grid.horizon() < *options.required_horizon * (1.0 - 1e-12)) {
    throw HorizonError("horizon too short: T_max = " + Num(grid.horizon()) +
                       " is below the bound T(R) = " +
                       Num(*options.required_horizon));
  }
  speed.Validate();
  ValueField phi(grid, n, kInf);
  const double dt = grid.dt;
  const Reach reach(domain, speed.k_max() * dt);
  SolveStationary(domain, cost, speed.slice(grid.steps), dt, reach, &phi);
  std::vector<Option> scratch;
  auto value = [&](double t, NodeId y) { return ValueAtTime(phi, t, y); };
  for (int j = grid.steps - 1; j >= 0; --j) {
    const std::span<const double> k = speed.slice(j);
    const double t = grid.TimeAt(j);
    for (std::size_t x = 0; x < n; ++x) {
      const NodeId id = static_cast<NodeId>(x);
      phi.at(j, id) = domain.IsTarget(id)
                          ? cost(id)
                          : Decide(reach, id, t, grid.TimeAt(j + 1), k[x], dt,
                                   &scratch, value)
                                .value;
    }
  }
  return phi;
}

Trajectory SynthesizeOptimal(const SpatialDomain& domain,
                             const ExitCost& cost, const ValueField& phi,
                             const SpeedField& speed, int start_index,
                             const Point& x0) {
  const TimeGrid& grid = phi.grid();
  if (!(speed.grid() == grid)) {
    throw PreconditionError("value and speed fields use different grids");
  }
  if (start_index < 0 || start_index > grid.steps) {
    throw RangeError("start index outside the time grid");
  }
  (void)cost;
  const double dt = grid.dt;
  const int last = grid.steps;
  const double horizon = grid.TimeAt(last);
  Point x = domain.Canonical(x0);
  Trajectory traj;
  traj.start_index = start_index;
  traj.samples.assign(grid.steps + 1, x);
  int cursor = start_index;
  auto finish = [&](NodeId target) {
    traj.exit_index = std::min(cursor, last);
    for (int i = cursor; i <= last; ++i) traj.samples[i] = Point::At(target);
    return traj;
  };
  auto stall = [&]() {
    return SynthesisStall("synthesis from " + domain.Describe(x0) +
                          " did not reach the target by the horizon; "
                          "stalled at " +
                          domain.Describe(x));
  };
  // Records the samples falling in [a, b); `at(f)` is the position after a
  // fraction f of the leg.
  auto leg = [&](double a, double b, const auto& at) {
    while (cursor <= last && grid.TimeAt(cursor) < b - 1e-9) {
      const double f = b > a ? (grid.TimeAt(cursor) - a) / (b - a) : 0.0;
      traj.samples[cursor] = domain.Canonical(at(std::clamp(f, 0.0, 1.0)));
      ++cursor;
    }
  };
  if (const auto target = domain.SnapToTarget(x)) {
    traj.exit_index = start_index;
    for (int i = start_index; i <= last; ++i) {
      traj.samples[i] = Point::At(*target);
    }
    return traj;
  }
  auto value = [&](double t, NodeId y) { return ValueAtTime(phi, t, y); };

  double t = grid.TimeAt(start_index);
  if (!x.AtNode()) {
    // Leave the edge through whichever endpoint is cheaper.
    const double len = domain.EdgeLength(x.node, x.next);
    const double k = speed.At(domain, start_index, x);
    const std::pair<NodeId, double> ends[2] = {{x.node, x.offset},
                                               {x.next, len - x.offset}};
    NodeId best_to = kNoNode;
    double best_value = kInf;
    double best_travel = 0.0;
    for (const auto& [to, travel] : ends) {
      const double v = travel / k + value(t + travel / k, to);
      const double tie = 1e-12 * std::max(1.0, std::abs(best_value));
      if (best_to == kNoNode || v < best_value - tie ||
          (std::abs(v - best_value) <= tie && travel < best_travel)) {
        best_to = to;
        best_value = v;
        best_travel = travel;
      }
    }
    const Point from = x;
    const bool down = best_to == from.node;
    const double end = t + best_travel / k;
    leg(t, end, [&](double f) {
      return Point{from.node, from.next,
                   down ? (1.0 - f) * from.offset
                        : from.offset + f * (len - from.offset)};
    });
    t = end;
    x = Point::At(best_to);
  }

  const Reach reach(domain, speed.k_max() * dt);
  std::vector<Option> options;
  while (!domain.IsTarget(x.node) && t < horizon - 1e-9) {
    const NodeId at = x.node;
    const double s = t / dt;
    const int j = static_cast<int>(std::llround(s));
    const bool on_grid = std::abs(s - j) < 1e-9;
    const double k =
        on_grid ? speed.at(j, at) : SpeedAtTime(speed, t, at);
    const double next_grid =
        on_grid ? grid.TimeAt(j + 1)
                : grid.TimeAt(static_cast<int>(std::floor(s)) + 1);
    const Choice c = Decide(reach, at, t, next_grid, k, dt, &options, value);
    if (!std::isfinite(c.value)) break;
    const double end = t + c.duration;
    if (c.to == at) {
      leg(t, end, [&](double) { return x; });
    } else {
      const bool along_edge = c.edge;
      const NodeId to = c.to;
      const double travel = c.travel;
      leg(t, end, [&](double f) {
        return along_edge ? Point{at, to, f * travel} : Point::At(at);
      });
      x = Point::At(to);
    }
    t = end;
  }
  if (domain.IsTarget(x.node) && x.AtNode() && t <= horizon + 1e-9) {
    return finish(x.node);
  }
  throw stall();
}

std::optional<int> FindExitIndex(const SpatialDomain& domain,
                                 const Trajectory& traj) {
  for (int j = std::max(0, traj.start_index);
       j < static_cast<int>(traj.samples.size()); ++j) {
    const Point& p = traj.samples[j];
    if (j == traj.start_index ? domain.SnapToTarget(p).has_value()
                              : p.AtNode() && domain.IsTarget(p.node)) {
      return j;
    }
  }
  return std::nullopt;
}

double FirstExitTime(const SpatialDomain& domain, const Trajectory& traj,
                     const TimeGrid& grid) {
  const auto idx = FindExitIndex(domain, traj);
  if (!idx.has_value()) return kNoExit;
  return (*idx - traj.start_index) * grid.dt;
}

double FinalCost(const SpatialDomain& domain, const Trajectory& traj,
                 const ExitCost& cost) {
  const auto idx = FindExitIndex(domain, traj);
  if (!idx.has_value()) return kNoExit;
  return cost(*domain.SnapToTarget(traj.samples[*idx]));
}

double RealizedCost(const SpatialDomain& domain, const Trajectory& traj,
                    const TimeGrid& grid, const ExitCost& cost) {
  const auto idx = FindExitIndex(domain, traj);
  if (!idx.has_value()) return kNoExit;
  return (*idx - traj.start_index) * grid.dt +
         cost(*domain.SnapToTarget(traj.samples[*idx]));
}

AdmissibilityReport IsAdmissible(const SpatialDomain& domain,
                                 const Trajectory& traj,
                                 const SpeedField& speed, double slack) {
  const TimeGrid& grid = speed.grid();
  if (static_cast<int>(traj.samples.size()) != grid.steps + 1) {
    throw PreconditionError("trajectory does not match the speed grid");
  }
  AdmissibilityReport report;
  for (int j = 0; j < grid.steps; ++j) {
    const double step = domain.Distance(traj.samples[j], traj.samples[j + 1]);
    const double allowance =
        speed.At(domain, j, traj.samples[j]) * grid.dt + slack;
    const double excess = step - allowance;
    if (excess > report.worst_excess) {
      report.worst_excess = excess;
      report.worst_step = j;
    }
  }
  report.admissible = !(report.worst_excess > 1e-12);
  return report;
}

double HorizonBound(const SpatialDomain& domain, const ExitCost& cost,
                    double k_min, double radius) {
  if (domain.targets().empty()) {
    throw DomainError("horizon bound needs a nonempty target set");
  }
  if (!(k_min > 0.0)) throw PreconditionError("k_min must be positive");
  if (radius < 0.0) throw PreconditionError("radius must be nonnegative");
  const NodeId y0 = domain.NearestTarget(domain.origin());
  const double d = domain.geodesic_constant();
  return cost(y0) + d * domain.Distance(domain.origin(), y0) / k_min +
         d * radius / k_min;
}

double TrajectoryBound(double horizon_bound, double k_max, double radius) {
  return k_max * horizon_bound + radius;
}

DppReport CheckDpp(const SpatialDomain& domain, const ValueField& phi,
                   const Trajectory& traj) {
  const TimeGrid& grid = phi.grid();
  if (static_cast<int>(traj.samples.size()) != grid.steps + 1) {
    throw PreconditionError("trajectory does not match the value grid");
  }
  DppReport report;
  const int t0 = traj.start_index;
  const double base = phi.At(domain, t0, traj.samples[t0]);
  const int end = FindExitIndex(domain, traj).value_or(grid.steps);
  for (int i = t0; i <= end; ++i) {
    // Samples strictly inside an edge are in transit, not decision points.
    if (!traj.samples[i].AtNode() && i != t0) continue;
    const double v =
        phi.At(domain, i, traj.samples[i]) + (i - t0) * grid.dt - base;
    report.inequality_residual = std::min(report.inequality_residual,
                                          std::min(0.0, v));
    report.equality_residual = std::max(report.equality_residual,
                                        std::abs(v));
    ++report.samples;
  }
  return report;
}

RegularityReport CheckValueRegularity(const SpatialDomain& domain,
                                      const ValueField& phi, double radius,
                                      int samples, std::uint64_t seed) {
  RegularityReport report;
  const std::vector<NodeId> ball = domain.Ball(domain.origin(), radius);
  const TimeGrid& grid = phi.grid();
  if (ball.empty()) return report;
  report.min_time_quotient = kInf;
  std::mt19937_64 rng(seed);
  auto node = [&]() { return ball[rng() % ball.size()]; };
  auto index = [&]() {
    return static_cast<int>(rng() % static_cast<std::uint64_t>(grid.steps + 1));
  };
  for (int s = 0; s < samples; ++s) {
    const NodeId a = node();
    const NodeId b = node();
    const int j = index();
    const double pa = phi.at(j, a);
    const double pb = phi.at(j, b);
    if (a != b && std::isfinite(pa) && std::isfinite(pb)) {
      report.spatial_lipschitz_ratio =
          std::max(report.spatial_lipschitz_ratio,
                   std::abs(pa - pb) / domain.Distance(a, b));
      ++report.pairs;
    }
    if (grid.steps == 0) continue;
    const NodeId x = node();
    int j0 = index();
    int j1 = (s % 2 == 0) ? j0 + 1 : index();
    if (j1 > grid.steps) j1 = j0 - 1;
    if (j0 == j1) continue;
    const double q0 = phi.at(j0, x);
    const double q1 = phi.at(j1, x);
    if (!std::isfinite(q0) || !std::isfinite(q1)) continue;
    const double quotient = (q0 - q1) / ((j0 - j1) * grid.dt);
    report.min_time_quotient = std::min(report.min_time_quotient, quotient);
    ++report.pairs;
  }
  if (!std::isfinite(report.min_time_quotient)) report.min_time_quotient = 0.0;
  report.time_floor_holds = report.min_time_quotient > -1.0;
  return report;
}

double DefaultTolDpp(const TimeGrid& grid, const SpatialDomain& domain) {
  return 4.0 * (grid.dt + domain.resolution());
}

TimeGrid DefaultTimeGrid(const SpatialDomain& domain, double k_max,
                         double horizon) {
  if (!(k_max > 0.0)) throw PreconditionError("k_max must be positive");
  TimeGrid grid;
  grid.dt = domain.resolution() / k_max;
  grid.steps = std::max(
      1, static_cast<int>(std::ceil(horizon / grid.dt - 1e-9)));
  return grid;
}

}  // namespace exitmfg
