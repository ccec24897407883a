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

#include "exitmfg/domain.h"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <queue>
#include <random>
#include <utility>

#include "exitmfg/errors.h"

namespace exitmfg {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kSnapFraction = 1e-9;
constexpr int kMaxGraphNodes = 2048;
constexpr int kMaxWalkDepth = 16;

long CheckedCellCount(double lo, double hi, double dx, const char* axis) {
  if (!(dx > 0.0) || !std::isfinite(dx)) {
    throw DomainError("grid spacing must be positive and finite");
  }
  if (!(hi > lo)) {
    throw DomainError(std::string("empty extent along ") + axis);
  }
  const double cells = (hi - lo) / dx;
  const long n = std::lround(cells);
  if (std::abs(cells - static_cast<double>(n)) >
      1e-9 * std::max(1.0, cells)) {
    throw DomainError(std::string("extent along ") + axis +
                      " is not a multiple of the grid spacing");
  }
  return n;
}

double Hypot(const Coords& a, const Coords& b) {
  return std::hypot(a[0] - b[0], a[1] - b[1]);
}

std::vector<double> DijkstraFrom(const std::vector<std::vector<Edge>>& adj,
                                 NodeId source,
                                 std::vector<NodeId>* predecessor) {
  const std::size_t n = adj.size();
  std::vector<double> dist(n, kInf);
  if (predecessor != nullptr) predecessor->assign(n, kNoNode);
  using Item = std::pair<double, NodeId>;
  std::priority_queue<Item, std::vector<Item>, std::greater<Item>> queue;
  dist[source] = 0.0;
  queue.push({0.0, source});
  while (!queue.empty()) {
    const auto [d, u] = queue.top();
    queue.pop();
    if (d > dist[u]) continue;
    for (const Edge& e : adj[u]) {
      const double nd = d + e.length;
      if (nd < dist[e.to]) {
        dist[e.to] = nd;
        if (predecessor != nullptr) (*predecessor)[e.to] = u;
        queue.push({nd, e.to});
      }
    }
  }
  return dist;
}

void SortAdjacency(std::vector<std::vector<Edge>>* adj) {
  for (auto& list : *adj) {
    std::sort(list.begin(), list.end(),
              [](const Edge& a, const Edge& b) { return a.to < b.to; });
  }
}

std::string FormatCoords(const Coords& c, int dimension) {
  char buf[96];
  if (dimension == 1) {
    std::snprintf(buf, sizeof(buf), "(%.6g)", c[0]);
  } else {
    std::snprintf(buf, sizeof(buf), "(%.6g, %.6g)", c[0], c[1]);
  }
  return buf;
}

}  // namespace

SpatialDomain SpatialDomain::Interval(double lo, double hi, double dx,
                                      const TargetPredicate& is_target,
                                      double origin) {
  const long cells = CheckedCellCount(lo, hi, dx, "x");
  SpatialDomain d;
  d.kind_ = BackendKind::kInterval;
  d.dimension_ = 1;
  d.dx_ = dx;
  d.lo_ = {lo, 0.0};
  d.nx_ = static_cast<int>(cells + 1);
  d.ny_ = 1;
  d.connectivity_ = 2;
  d.coords_.resize(d.nx_);
  d.adjacency_.resize(d.nx_);
  for (int i = 0; i < d.nx_; ++i) {
    d.coords_[i] = {lo + i * dx, 0.0};
    if (i > 0) d.adjacency_[i].push_back({i - 1, dx});
    if (i + 1 < d.nx_) d.adjacency_[i].push_back({i + 1, dx});
  }
  std::vector<NodeId> targets;
  for (int i = 0; i < d.nx_; ++i) {
    if (is_target && is_target(d.coords_[i])) targets.push_back(i);
  }
  const NodeId o = d.NearestNode({origin, 0.0});
  if (std::abs(d.coords_[o][0] - origin) > 1e-6 * dx) {
    throw DomainError("origin does not lie on a grid node");
  }
  d.Finalize(std::move(targets), o);
  return d;
}

SpatialDomain SpatialDomain::Grid2d(Coords lo, Coords hi, double dx,
                                    int connectivity,
                                    const TargetPredicate& is_target,
                                    Coords origin) {
  if (connectivity != 4 && connectivity != 8) {
    throw DomainError("grid2d connectivity must be 4 or 8");
  }
  const long cx = CheckedCellCount(lo[0], hi[0], dx, "x");
  const long cy = CheckedCellCount(lo[1], hi[1], dx, "y");
  SpatialDomain d;
  d.kind_ = BackendKind::kGrid2d;
  d.dimension_ = 2;
  d.dx_ = dx;
  d.lo_ = lo;
  d.nx_ = static_cast<int>(cx + 1);
  d.ny_ = static_cast<int>(cy + 1);
  d.connectivity_ = connectivity;
  const std::size_t n = static_cast<std::size_t>(d.nx_) * d.ny_;
  d.coords_.resize(n);
  d.adjacency_.resize(n);
  const double diag = dx * std::sqrt(2.0);
  for (int j = 0; j < d.ny_; ++j) {
    for (int i = 0; i < d.nx_; ++i) {
      const NodeId id = i + d.nx_ * j;
      d.coords_[id] = {lo[0] + i * dx, lo[1] + j * dx};
      for (int dj = -1; dj <= 1; ++dj) {
        for (int di = -1; di <= 1; ++di) {
          if (di == 0 && dj == 0) continue;
          const bool diagonal = di != 0 && dj != 0;
          if (diagonal && connectivity == 4) continue;
          const int ni = i + di;
          const int nj = j + dj;
          if (ni < 0 || nj < 0 || ni >= d.nx_ || nj >= d.ny_) continue;
          d.adjacency_[id].push_back({ni + d.nx_ * nj, diagonal ? diag : dx});
        }
      }
    }
  }
  SortAdjacency(&d.adjacency_);
  std::vector<NodeId> targets;
  for (std::size_t id = 0; id < n; ++id) {
    if (is_target && is_target(d.coords_[id])) {
      targets.push_back(static_cast<NodeId>(id));
    }
  }
  const NodeId o = d.NearestNode(origin);
  if (Hypot(d.coords_[o], origin) > 1e-6 * dx) {
    throw DomainError("origin does not lie on a grid node");
  }
  d.Finalize(std::move(targets), o);
  return d;
}

SpatialDomain SpatialDomain::Graph(std::vector<Coords> coords,
                                   std::vector<GraphEdge> edges,
                                   GraphMetric metric,
                                   std::vector<NodeId> targets,
                                   NodeId origin) {
  const std::size_t n = coords.size();
  if (n == 0) throw DomainError("graph has no nodes");
  if (n > static_cast<std::size_t>(kMaxGraphNodes)) {
    throw DomainError("graph backend supports at most 2048 nodes");
  }
  SpatialDomain d;
  d.kind_ = BackendKind::kGraph;
  d.metric_ = metric;
  d.dimension_ = 2;
  d.coords_ = std::move(coords);
  d.adjacency_.resize(n);
  for (const GraphEdge& e : edges) {
    if (e.a < 0 || e.b < 0 || static_cast<std::size_t>(e.a) >= n ||
        static_cast<std::size_t>(e.b) >= n) {
      throw DomainError("edge references an unknown node");
    }
    if (e.a == e.b) throw DomainError("self-loop edges are not allowed");
    const double len =
        e.length > 0.0 ? e.length : Hypot(d.coords_[e.a], d.coords_[e.b]);
    if (!(len > 0.0) || !std::isfinite(len)) {
      throw DomainError("edge lengths must be strictly positive");
    }
    if (metric == GraphMetric::kEuclidean &&
        len < Hypot(d.coords_[e.a], d.coords_[e.b]) * (1.0 - 1e-12)) {
      throw DomainError("edge shorter than the Euclidean distance of its ends");
    }
    auto upsert = [&](NodeId from, NodeId to) {
      for (Edge& existing : d.adjacency_[from]) {
        if (existing.to == to) {
          existing.length = std::min(existing.length, len);
          return;
        }
      }
      d.adjacency_[from].push_back({to, len});
    };
    upsert(e.a, e.b);
    upsert(e.b, e.a);
  }
  SortAdjacency(&d.adjacency_);
  d.all_pairs_.assign(n * n, kInf);
  for (std::size_t s = 0; s < n; ++s) {
    const std::vector<double> row =
        DijkstraFrom(d.adjacency_, static_cast<NodeId>(s), nullptr);
    std::copy(row.begin(), row.end(), d.all_pairs_.begin() + s * n);
  }
  if (metric == GraphMetric::kEuclidean) {
    double worst = 1.0;
    for (std::size_t a = 0; a < n; ++a) {
      for (std::size_t b = a + 1; b < n; ++b) {
        const double e = Hypot(d.coords_[a], d.coords_[b]);
        if (!(e > 0.0)) {
          throw DomainError("distinct nodes share coordinates");
        }
        const double g = d.all_pairs_[a * n + b];
        if (std::isfinite(g)) worst = std::max(worst, g / e);
      }
    }
    d.geodesic_constant_ = worst;
  }
  if (origin < 0 || static_cast<std::size_t>(origin) >= n) {
    throw DomainError("origin is not a domain node");
  }
  d.Finalize(std::move(targets), origin);
  return d;
}

void SpatialDomain::Finalize(std::vector<NodeId> targets, NodeId origin) {
  const std::size_t n = coords_.size();
  std::sort(targets.begin(), targets.end());
  targets.erase(std::unique(targets.begin(), targets.end()), targets.end());
  for (NodeId t : targets) {
    if (t < 0 || static_cast<std::size_t>(t) >= n) {
      throw DomainError("target references an unknown node");
    }
  }
  targets_ = std::move(targets);
  origin_ = origin;
  is_target_.assign(n, 0);
  for (NodeId t : targets_) is_target_[t] = 1;

  resolution_ = kInf;
  for (const auto& list : adjacency_) {
    for (const Edge& e : list) resolution_ = std::min(resolution_, e.length);
  }
  if (!std::isfinite(resolution_)) resolution_ = dx_ > 0.0 ? dx_ : 1.0;

  const std::vector<double> from_zero = DijkstraFrom(adjacency_, 0, nullptr);
  connected_ = std::all_of(from_zero.begin(), from_zero.end(),
                           [](double v) { return std::isfinite(v); });

  target_distance_.assign(n, kInf);
  nearest_target_.assign(n, kNoNode);
  for (std::size_t x = 0; x < n; ++x) {
    for (NodeId t : targets_) {
      const double dist = NodeDistance(static_cast<NodeId>(x), t);
      if (dist < target_distance_[x]) {
        target_distance_[x] = dist;
        nearest_target_[x] = t;
      }
    }
  }
}

bool SpatialDomain::IsTarget(NodeId n) const {
  CheckNode(n);
  return is_target_[n] != 0;
}

void SpatialDomain::CheckNode(NodeId n) const {
  if (n < 0 || static_cast<std::size_t>(n) >= coords_.size()) {
    throw DomainError("unknown node " + std::to_string(n));
  }
}

const Coords& SpatialDomain::coordinates(NodeId n) const {
  CheckNode(n);
  return coords_[n];
}

Coords SpatialDomain::coordinates(const Point& p) const {
  if (p.AtNode()) return coordinates(p.node);
  const double w = p.offset / EdgeLength(p.node, p.next);
  const Coords& a = coords_[p.node];
  const Coords& b = coords_[p.next];
  return {(1.0 - w) * a[0] + w * b[0], (1.0 - w) * a[1] + w * b[1]};
}

std::span<const Edge> SpatialDomain::neighbors(NodeId n) const {
  CheckNode(n);
  return adjacency_[n];
}

double SpatialDomain::EdgeLength(NodeId a, NodeId b) const {
  CheckNode(a);
  CheckNode(b);
  for (const Edge& e : adjacency_[a]) {
    if (e.to == b) return e.length;
  }
  throw DomainError("nodes " + std::to_string(a) + " and " +
                    std::to_string(b) + " are not adjacent");
}

double SpatialDomain::NodeDistance(NodeId x, NodeId y) const {
  switch (kind_) {
    case BackendKind::kInterval:
      return std::abs(x - y) * dx_;
    case BackendKind::kGrid2d: {
      const int di = std::abs(x % nx_ - y % nx_);
      const int dj = std::abs(x / nx_ - y / nx_);
      if (connectivity_ == 4) return (di + dj) * dx_;
      const int lo = std::min(di, dj);
      const int hi = std::max(di, dj);
      return ((hi - lo) + lo * std::sqrt(2.0)) * dx_;
    }
    case BackendKind::kGraph:
      if (metric_ == GraphMetric::kEuclidean) {
        return Hypot(coords_[x], coords_[y]);
      }
      return all_pairs_[static_cast<std::size_t>(x) * coords_.size() + y];
  }
  return kInf;
}

double SpatialDomain::Distance(NodeId x, NodeId y) const {
  CheckNode(x);
  CheckNode(y);
  if (x == y) return 0.0;
  return NodeDistance(x, y);
}

double SpatialDomain::Distance(const Point& p, const Point& q) const {
  if (p.AtNode() && q.AtNode()) return Distance(p.node, q.node);
  if (kind_ == BackendKind::kInterval ||
      (kind_ == BackendKind::kGraph && metric_ == GraphMetric::kEuclidean)) {
    return Hypot(coordinates(p), coordinates(q));
  }
  // Shortest-path metric: route through the endpoints of each edge.
  struct Exit {
    NodeId node;
    double cost;
  };
  auto exits = [&](const Point& r, Exit out[2]) {
    if (r.AtNode()) {
      out[0] = {r.node, 0.0};
      return 1;
    }
    const double len = EdgeLength(r.node, r.next);
    out[0] = {r.node, r.offset};
    out[1] = {r.next, len - r.offset};
    return 2;
  };
  Exit ep[2];
  Exit eq[2];
  const int np = exits(p, ep);
  const int nq = exits(q, eq);
  double best = kInf;
  if (!p.AtNode() && !q.AtNode() && p.node == q.node && p.next == q.next) {
    best = std::abs(p.offset - q.offset);
  }
  for (int i = 0; i < np; ++i) {
    for (int j = 0; j < nq; ++j) {
      const double via = ep[i].node == eq[j].node
                             ? 0.0
                             : NodeDistance(ep[i].node, eq[j].node);
      best = std::min(best, ep[i].cost + via + eq[j].cost);
    }
  }
  return best;
}

Path SpatialDomain::Geodesic(NodeId x, NodeId y) const {
  CheckNode(x);
  CheckNode(y);
  Path path;
  if (x == y) {
    path.nodes.push_back(x);
    return path;
  }
  if (kind_ == BackendKind::kInterval) {
    const int step = y > x ? 1 : -1;
    for (NodeId n = x; n != y; n += step) path.nodes.push_back(n);
    path.nodes.push_back(y);
    path.length = NodeDistance(x, y);
    return path;
  }
  std::vector<NodeId> pred;
  const std::vector<double> dist = DijkstraFrom(adjacency_, x, &pred);
  if (!std::isfinite(dist[y])) {
    throw DomainError("no path between " + Describe(x) + " and " +
                      Describe(y) + ": domain is disconnected");
  }
  for (NodeId n = y; n != kNoNode; n = pred[n]) path.nodes.push_back(n);
  std::reverse(path.nodes.begin(), path.nodes.end());
  for (std::size_t i = 1; i < path.nodes.size(); ++i) {
    path.length += EdgeLength(path.nodes[i - 1], path.nodes[i]);
  }
  return path;
}

double SpatialDomain::DistanceToTarget(NodeId x) const {
  CheckNode(x);
  return target_distance_[x];
}

double SpatialDomain::DistanceToTarget(const Point& p) const {
  if (p.AtNode()) return DistanceToTarget(p.node);
  if (kind_ == BackendKind::kGraph && metric_ == GraphMetric::kEuclidean) {
    double best = kInf;
    const Coords c = coordinates(p);
    for (NodeId t : targets_) best = std::min(best, Hypot(c, coords_[t]));
    return best;
  }
  const double len = EdgeLength(p.node, p.next);
  return std::min(p.offset + target_distance_[p.node],
                  len - p.offset + target_distance_[p.next]);
}

NodeId SpatialDomain::NearestTarget(NodeId x) const {
  CheckNode(x);
  if (targets_.empty()) throw DomainError("target set is empty");
  return nearest_target_[x];
}

std::optional<NodeId> SpatialDomain::SnapToTarget(const Point& p) const {
  if (p.AtNode()) {
    if (is_target_[p.node]) return p.node;
    return std::nullopt;
  }
  const double len = EdgeLength(p.node, p.next);
  const double reach = 0.5 * resolution_ * (1.0 + 1e-9);
  std::optional<NodeId> best;
  double best_dist = kInf;
  const std::pair<NodeId, double> ends[2] = {{p.node, p.offset},
                                             {p.next, len - p.offset}};
  for (const auto& [node, dist] : ends) {
    if (is_target_[node] && dist <= reach && dist < best_dist) {
      best = node;
      best_dist = dist;
    }
  }
  return best;
}

NodeId SpatialDomain::NearestNode(const Coords& c) const {
  if (kind_ == BackendKind::kInterval || kind_ == BackendKind::kGrid2d) {
    const long i = std::clamp(std::lround((c[0] - lo_[0]) / dx_), 0L,
                              static_cast<long>(nx_ - 1));
    long j = 0;
    if (kind_ == BackendKind::kGrid2d) {
      j = std::clamp(std::lround((c[1] - lo_[1]) / dx_), 0L,
                     static_cast<long>(ny_ - 1));
    }
    return static_cast<NodeId>(i + nx_ * j);
  }
  NodeId best = 0;
  double best_dist = kInf;
  for (std::size_t n = 0; n < coords_.size(); ++n) {
    const double dist = Hypot(coords_[n], c);
    if (dist < best_dist) {
      best_dist = dist;
      best = static_cast<NodeId>(n);
    }
  }
  return best;
}

std::vector<NodeId> SpatialDomain::Ball(NodeId center, double radius) const {
  CheckNode(center);
  std::vector<NodeId> out;
  const double limit = radius * (1.0 + 1e-12) + 1e-12;
  for (std::size_t n = 0; n < coords_.size(); ++n) {
    if (Distance(center, static_cast<NodeId>(n)) <= limit) {
      out.push_back(static_cast<NodeId>(n));
    }
  }
  return out;
}

Point SpatialDomain::Canonical(Point p) const {
  CheckNode(p.node);
  if (p.next == kNoNode) {
    p.offset = 0.0;
    return p;
  }
  const double len = EdgeLength(p.node, p.next);
  const double tol = kSnapFraction * len;
  if (p.offset <= tol) return Point::At(p.node);
  if (p.offset >= len - tol) return Point::At(p.next);
  if (p.node > p.next) {
    std::swap(p.node, p.next);
    p.offset = len - p.offset;
  }
  return p;
}

namespace {

struct WalkContext {
  const SpatialDomain* domain;
  std::vector<Move>* out;
};

void Walk(const WalkContext& ctx, NodeId from, NodeId to, double length,
          double start, double remaining, double travelled, int depth) {
  const double tol = kSnapFraction * length;
  const double left_on_edge = length - start;
  if (remaining < left_on_edge - tol) {
    ctx.out->push_back(
        {ctx.domain->Canonical({from, to, start + remaining}),
         travelled + remaining});
    return;
  }
  const double arrived = travelled + left_on_edge;
  ctx.out->push_back({Point::At(to), arrived});
  const double rest = remaining - left_on_edge;
  if (rest <= tol || depth >= kMaxWalkDepth) return;
  for (const Edge& e : ctx.domain->neighbors(to)) {
    if (e.to == from) continue;
    Walk(ctx, to, e.to, e.length, 0.0, rest, arrived, depth + 1);
  }
}

}  // namespace

void SpatialDomain::Moves(const Point& p, double step,
                          std::vector<Move>* out) const {
  out->clear();
  if (!(step > 0.0)) return;
  const WalkContext ctx{this, out};
  if (p.AtNode()) {
    for (const Edge& e : neighbors(p.node)) {
      Walk(ctx, p.node, e.to, e.length, 0.0, step, 0.0, 0);
    }
    return;
  }
  const double len = EdgeLength(p.node, p.next);
  Walk(ctx, p.next, p.node, len, len - p.offset, step, 0.0, 0);
  Walk(ctx, p.node, p.next, len, p.offset, step, 0.0, 0);
}

double SpatialDomain::Interpolate(std::span<const double> nodal,
                                  const Point& p) const {
  if (nodal.size() != coords_.size()) {
    throw PreconditionError("nodal array size does not match the domain");
  }
  if (p.AtNode()) return nodal[p.node];
  const double w = p.offset / EdgeLength(p.node, p.next);
  const double a = nodal[p.node];
  const double b = nodal[p.next];
  if (!std::isfinite(a) || !std::isfinite(b)) return kInf;
  return (1.0 - w) * a + w * b;
}

std::string SpatialDomain::Describe(NodeId n) const {
  CheckNode(n);
  return "node " + std::to_string(n) + " " +
         FormatCoords(coords_[n], dimension_);
}

std::string SpatialDomain::Describe(const Point& p) const {
  if (p.AtNode()) return Describe(p.node);
  return "point " + FormatCoords(coordinates(p), dimension_) + " on edge " +
         std::to_string(p.node) + "-" + std::to_string(p.next);
}

ExitCost ExitCost::Constant(const SpatialDomain& domain, double value) {
  ExitCost c;
  c.values_.assign(domain.node_count(), value);
  c.lipschitz_ = 0.0;
  return c;
}

ExitCost ExitCost::FromTable(
    const SpatialDomain& domain,
    const std::vector<std::pair<NodeId, double>>& table, double lipschitz) {
  ExitCost c;
  c.values_.assign(domain.node_count(), 0.0);
  for (const auto& [node, value] : table) {
    if (!domain.IsTarget(node)) {
      throw DomainError("exit cost given at " + domain.Describe(node) +
                        ", which is not a target");
    }
    c.values_[node] = value;
  }
  if (lipschitz >= 0.0) {
    c.lipschitz_ = lipschitz;
    return c;
  }
  double worst = 0.0;
  const auto targets = domain.targets();
  for (std::size_t i = 0; i < targets.size(); ++i) {
    for (std::size_t j = i + 1; j < targets.size(); ++j) {
      const double dist = domain.Distance(targets[i], targets[j]);
      if (dist > 0.0 && std::isfinite(dist)) {
        worst = std::max(
            worst, std::abs(c.values_[targets[i]] - c.values_[targets[j]]) /
                       dist);
      }
    }
  }
  c.lipschitz_ = worst;
  return c;
}

double ExitCost::MaxValue(const SpatialDomain& domain) const {
  double best = 0.0;
  for (NodeId t : domain.targets()) best = std::max(best, values_[t]);
  return best;
}

HypothesisReport ValidateHypotheses(const SpatialDomain& domain,
                                    const ExitCost& cost) {
  HypothesisReport report;
  const std::size_t n = domain.node_count();
  std::mt19937_64 rng(0x5eed);
  auto pick = [&]() { return static_cast<NodeId>(rng() % n); };

  {
    Check c{"H1", true, 0.0, 1e-9, ""};
    double worst = 0.0;
    for (int s = 0; s < 256 && n > 0; ++s) {
      const NodeId a = pick();
      const NodeId b = pick();
      const NodeId m = pick();
      const double ab = domain.Distance(a, b);
      const double defect = std::max(
          {ab - domain.Distance(a, m) - domain.Distance(m, b),
           std::abs(ab - domain.Distance(b, a)),
           a == b ? ab : (ab > 0.0 ? 0.0 : 1.0)});
      if (defect > worst) {
        worst = defect;
        c.detail = "witness " + domain.Describe(a) + ", " + domain.Describe(b);
      }
    }
    c.measured = worst;
    c.passed = n > 0 && worst <= c.threshold;
    if (c.passed) {
      c.detail = std::to_string(n) + " nodes";
      if (domain.truncation_radius() > 0.0) {
        char buf[96];
        std::snprintf(buf, sizeof(buf),
                      "; truncated emulation of an unbounded space, radius "
                      "%.6g",
                      domain.truncation_radius());
        c.detail += buf;
      }
    }
    report.Add(c);
  }

  {
    Check c{"H2", !domain.targets().empty(),
            static_cast<double>(domain.targets().size()), 1.0, ""};
    c.detail = c.passed
                   ? std::to_string(domain.targets().size()) + " target nodes"
                   : "target set is empty";
    report.Add(c);
  }

  {
    Check c{"H3", true, 0.0, cost.lipschitz(), ""};
    const auto targets = domain.targets();
    if (cost.values().size() != n) {
      c.passed = false;
      c.detail = "exit cost does not match the domain";
    } else {
      for (NodeId t : targets) {
        const double v = cost(t);
        if (!std::isfinite(v) || v < 0.0) {
          c.passed = false;
          c.detail = "invalid exit cost at " + domain.Describe(t);
          break;
        }
      }
      double worst = 0.0;
      for (std::size_t i = 0; c.passed && i < targets.size(); ++i) {
        for (std::size_t j = i + 1; j < targets.size(); ++j) {
          const double dist = domain.Distance(targets[i], targets[j]);
          if (!(dist > 0.0) || !std::isfinite(dist)) continue;
          const double jump = std::abs(cost(targets[i]) - cost(targets[j]));
          const double ratio = jump / dist;
          if (ratio > worst) worst = ratio;
          if (jump > cost.lipschitz() * dist * (1.0 + 1e-12) + 1e-12) {
            c.passed = false;
            c.measured = ratio;
            c.detail = "Lipschitz bound violated between " +
                       domain.Describe(targets[i]) + " and " +
                       domain.Describe(targets[j]);
            break;
          }
        }
      }
      if (c.passed) c.measured = worst;
    }
    report.Add(c);
  }

  {
    Check c{"H4", domain.connected(), 1.0, domain.geodesic_constant(), ""};
    if (!domain.connected()) {
      c.detail = "domain graph is disconnected";
    } else {
      double worst = 0.0;
      for (int s = 0; s < 32; ++s) {
        const NodeId a = pick();
        const NodeId b = pick();
        if (a == b) continue;
        const double ratio =
            domain.Geodesic(a, b).length / domain.Distance(a, b);
        if (ratio > worst) {
          worst = ratio;
          if (ratio > domain.geodesic_constant() * (1.0 + 1e-9)) {
            c.passed = false;
            c.detail = "geodesic longer than D times the distance between " +
                       domain.Describe(a) + " and " + domain.Describe(b);
          }
        }
      }
      c.measured = worst;
      if (c.passed) {
        char buf[64];
        std::snprintf(buf, sizeof(buf), "D = %.6g", domain.geodesic_constant());
        c.detail = buf;
      }
    }
    report.Add(c);
  }
  return report;
}

}  // namespace exitmfg
