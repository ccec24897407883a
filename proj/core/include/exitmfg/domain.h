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

#ifndef EXITMFG_DOMAIN_H_
#define EXITMFG_DOMAIN_H_

#include <array>
#include <compare>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "exitmfg/hypotheses.h"

namespace exitmfg {

using NodeId = std::int32_t;
inline constexpr NodeId kNoNode = -1;

using Coords = std::array<double, 2>;

// A location on the domain graph. The point lies on the edge from `node` to
// `next`, at arc length `offset` from `node`; `next == kNoNode` means the
// point sits exactly on `node`. Points returned by SpatialDomain are
// canonical: on-edge points always have node < next.
struct Point {
  NodeId node = 0;
  NodeId next = kNoNode;
  double offset = 0.0;

  static Point At(NodeId n) { return Point{n, kNoNode, 0.0}; }
  bool AtNode() const { return next == kNoNode; }

  friend bool operator==(const Point&, const Point&) = default;
  friend std::partial_ordering operator<=>(const Point&,
                                           const Point&) = default;
};

enum class BackendKind { kInterval, kGrid2d, kGraph };
enum class GraphMetric { kShortestPath, kEuclidean };

struct Edge {
  NodeId to;
  double length;
};

struct GraphEdge {
  NodeId a;
  NodeId b;
  // Nonpositive means "use the Euclidean distance between the endpoints".
  double length = 0.0;
};

// Candidate position reached by travelling `travel` arc length from a start.
struct Move {
  Point point;
  double travel;
};

struct Path {
  std::vector<NodeId> nodes;
  double length = 0.0;
};

using TargetPredicate = std::function<bool(const Coords&)>;

// Finite metric graph standing in for the state space X, with origin and
// target set. Immutable after construction.
class SpatialDomain {
 public:
  // Uniform grid lo, lo + dx, ..., hi on a line.
  static SpatialDomain Interval(double lo, double hi, double dx,
                                const TargetPredicate& is_target,
                                double origin);

  // Rectangular lattice with 4- or 8-connectivity; diagonal edges have
  // length dx * sqrt(2).
  static SpatialDomain Grid2d(Coords lo, Coords hi, double dx,
                              int connectivity,
                              const TargetPredicate& is_target,
                              Coords origin);

  static SpatialDomain Graph(std::vector<Coords> coords,
                             std::vector<GraphEdge> edges, GraphMetric metric,
                             std::vector<NodeId> targets, NodeId origin);

  BackendKind kind() const { return kind_; }
  int dimension() const { return dimension_; }
  std::size_t node_count() const { return coords_.size(); }
  NodeId origin() const { return origin_; }
  // Grid spacing, or the shortest edge of a general graph.
  double resolution() const { return resolution_; }
  double geodesic_constant() const { return geodesic_constant_; }
  bool connected() const { return connected_; }
  std::span<const NodeId> targets() const { return targets_; }
  bool IsTarget(NodeId n) const;

  // Radius of the truncated region when the domain emulates an unbounded
  // space; zero otherwise. Reported, never used by the numerics.
  double truncation_radius() const { return truncation_radius_; }
  void set_truncation_radius(double r) { truncation_radius_ = r; }

  const Coords& coordinates(NodeId n) const;
  Coords coordinates(const Point& p) const;
  std::span<const Edge> neighbors(NodeId n) const;
  double EdgeLength(NodeId a, NodeId b) const;

  double Distance(NodeId x, NodeId y) const;
  double Distance(const Point& p, const Point& q) const;

  // Unit-speed path realising the graph distance. Throws DomainError when no
  // path exists.
  Path Geodesic(NodeId x, NodeId y) const;

  double DistanceToTarget(NodeId x) const;
  double DistanceToTarget(const Point& p) const;
  // Target node nearest to x (lowest id on ties). Throws on empty target.
  NodeId NearestTarget(NodeId x) const;

  // Target node within resolution()/2 of p, if any.
  std::optional<NodeId> SnapToTarget(const Point& p) const;

  NodeId NearestNode(const Coords& c) const;
  std::vector<NodeId> Ball(NodeId center, double radius) const;

  // Points at arc length `step` from p along the graph, one per direction and
  // per branch, together with every node crossed on the way. Dead ends clamp
  // at the node. The null move is not included. Over each listed segment the
  // piecewise-linear interpolant is extremal at the listed points.
  void Moves(const Point& p, double step, std::vector<Move>* out) const;

  // Edge-linear interpolation of nodal values at p.
  double Interpolate(std::span<const double> nodal, const Point& p) const;

  Point Canonical(Point p) const;
  void CheckNode(NodeId n) const;
  std::string Describe(NodeId n) const;
  std::string Describe(const Point& p) const;

 private:
  SpatialDomain() = default;
  void Finalize(std::vector<NodeId> targets, NodeId origin);
  double NodeDistance(NodeId x, NodeId y) const;

  BackendKind kind_ = BackendKind::kInterval;
  GraphMetric metric_ = GraphMetric::kShortestPath;
  int dimension_ = 1;
  std::vector<Coords> coords_;
  std::vector<std::vector<Edge>> adjacency_;
  std::vector<NodeId> targets_;
  std::vector<char> is_target_;
  std::vector<double> target_distance_;
  std::vector<NodeId> nearest_target_;
  NodeId origin_ = 0;
  double resolution_ = 0.0;
  double geodesic_constant_ = 1.0;
  bool connected_ = true;
  double truncation_radius_ = 0.0;

  // Lattice parameters (interval and grid2d backends).
  double dx_ = 0.0;
  Coords lo_{};
  int nx_ = 0;
  int ny_ = 1;
  int connectivity_ = 2;

  // All-pairs shortest paths, graph backend only.
  std::vector<double> all_pairs_;
};

// Exit cost g on the target set. Values are stored per node and are only
// meaningful on target nodes.
class ExitCost {
 public:
  ExitCost() = default;
  static ExitCost Constant(const SpatialDomain& domain, double value);
  // Values for listed target nodes; unlisted targets get 0. A negative
  // lipschitz constant means "compute the tightest one".
  static ExitCost FromTable(const SpatialDomain& domain,
                            const std::vector<std::pair<NodeId, double>>& table,
                            double lipschitz = -1.0);

  double operator()(NodeId n) const { return values_[n]; }
  std::span<const double> values() const { return values_; }
  double lipschitz() const { return lipschitz_; }
  double MaxValue(const SpatialDomain& domain) const;

 private:
  std::vector<double> values_;
  double lipschitz_ = 0.0;
};

// Checks of the structural hypotheses on (X, d, 0, Gamma, D, g).
HypothesisReport ValidateHypotheses(const SpatialDomain& domain,
                                    const ExitCost& cost);

}  // namespace exitmfg

#endif  // EXITMFG_DOMAIN_H_
