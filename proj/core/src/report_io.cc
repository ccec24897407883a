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

#include "exitmfg/report_io.h"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <map>
#include <sstream>

#include "exitmfg/errors.h"

namespace exitmfg {
namespace {

void AppendCoords(const SpatialDomain& domain, const Coords& c,
                  std::string* out) {
  *out += FormatDouble(c[0]);
  if (domain.dimension() == 2) {
    *out += ',';
    *out += FormatDouble(c[1]);
  }
}

std::string CoordHeader(const SpatialDomain& domain) {
  return domain.dimension() == 2 ? "x,y" : "x";
}

std::vector<std::string> SplitCsv(const std::string& line) {
  std::vector<std::string> out;
  std::size_t start = 0;
  for (;;) {
    const std::size_t comma = line.find(',', start);
    out.push_back(line.substr(start, comma - start));
    if (comma == std::string::npos) break;
    start = comma + 1;
  }
  return out;
}

double ParseNumber(const std::string& s, const std::string& file, int line) {
  char* end = nullptr;
  const double v = std::strtod(s.c_str(), &end);
  if (s.empty() || end != s.c_str() + s.size()) {
    throw ArtifactError(file + ": malformed number '" + s + "' on line " +
                        std::to_string(line));
  }
  return v;
}

}  // namespace

std::string FormatDouble(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  if (v == 0.0) return "0";
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.12g", v);
  return buf;
}

double Round12(double v) {
  if (!std::isfinite(v)) return v;
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.12g", v);
  return std::strtod(buf, nullptr);
}

std::uint64_t Fnv1a64(std::string_view data) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : data) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::string HexDigest(std::uint64_t digest) {
  char buf[20];
  std::snprintf(buf, sizeof(buf), "%016llx",
                static_cast<unsigned long long>(digest));
  return buf;
}

void WriteTextFile(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw ArtifactError("cannot open " + path + " for writing");
  out << content;
  if (!out) throw ArtifactError("failed writing " + path);
}

std::string ReadTextFile(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ArtifactError("missing artifact " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string TrajectoriesCsv(const SpatialDomain& domain,
                            const TrajectoryEnsemble& q) {
  std::string out =
      "particle_id,weight,t,node,next,offset," + CoordHeader(domain) +
      ",exited\n";
  const TimeGrid& grid = q.grid();
  for (std::size_t i = 0; i < q.size(); ++i) {
    const WeightedTrajectory& m = q.members()[i];
    const Trajectory& t = m.trajectory;
    const int last = t.exit_index.value_or(grid.steps);
    const std::string id = std::to_string(i);
    const std::string w = FormatDouble(m.weight);
    for (int j = 0; j <= last; ++j) {
      const Point& p = t.samples[j];
      out += id;
      out += ',';
      out += w;
      out += ',';
      out += FormatDouble(grid.TimeAt(j));
      out += ',';
      out += std::to_string(p.node);
      out += ',';
      out += std::to_string(p.next);
      out += ',';
      out += FormatDouble(p.offset);
      out += ',';
      AppendCoords(domain, domain.coordinates(p), &out);
      out += t.exit_index.has_value() && j >= *t.exit_index ? ",1\n" : ",0\n";
    }
  }
  return out;
}

TrajectoryEnsemble ParseTrajectoriesCsv(const SpatialDomain& domain,
                                        const TimeGrid& grid,
                                        const std::string& text,
                                        const std::string& file_name) {
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line) || line.rfind("particle_id,", 0) != 0) {
    throw ArtifactError(file_name + ": missing header");
  }
  const std::size_t columns = SplitCsv(line).size();
  struct Pending {
    double weight = 0.0;
    std::vector<Point> samples;
    std::optional<int> exit_index;
  };
  std::map<long, Pending> pending;
  int line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    const std::vector<std::string> f = SplitCsv(line);
    if (f.size() != columns) {
      throw ArtifactError(file_name + ": line " + std::to_string(line_no) +
                          " has " + std::to_string(f.size()) +
                          " fields, expected " + std::to_string(columns));
    }
    const long id = static_cast<long>(ParseNumber(f[0], file_name, line_no));
    Pending& p = pending[id];
    p.weight = ParseNumber(f[1], file_name, line_no);
    Point pt;
    pt.node = static_cast<NodeId>(ParseNumber(f[3], file_name, line_no));
    pt.next = static_cast<NodeId>(ParseNumber(f[4], file_name, line_no));
    pt.offset = ParseNumber(f[5], file_name, line_no);
    domain.CheckNode(pt.node);
    if (pt.next != kNoNode) domain.CheckNode(pt.next);
    const int j = static_cast<int>(p.samples.size());
    const double t = ParseNumber(f[2], file_name, line_no);
    if (std::abs(t - grid.TimeAt(j)) > 1e-9 * std::max(1.0, grid.horizon())) {
      throw ArtifactError(file_name + ": line " + std::to_string(line_no) +
                          " breaks the time grid");
    }
    p.samples.push_back(pt);
    if (f.back() == "1" && !p.exit_index.has_value()) p.exit_index = j;
  }
  double total = 0.0;
  for (const auto& [id, p] : pending) total += p.weight;
  if (pending.empty() || !(total > 0.0)) {
    throw ArtifactError(file_name + ": no trajectories");
  }
  TrajectoryEnsemble q(grid);
  for (auto& [id, p] : pending) {
    const int expected = p.exit_index.value_or(grid.steps) + 1;
    if (static_cast<int>(p.samples.size()) != expected) {
      throw ArtifactError(file_name + ": trajectory " + std::to_string(id) +
                          " is truncated");
    }
    Trajectory t;
    t.samples = std::move(p.samples);
    t.samples.resize(grid.steps + 1, t.samples.back());
    t.exit_index = p.exit_index;
    q.Add(std::move(t), p.weight / total);
  }
  return q;
}

std::string MarginalsCsv(const SpatialDomain& domain,
                         const TrajectoryEnsemble& q,
                         const std::vector<int>& indices) {
  std::string out = "t," + CoordHeader(domain) + ",weight\n";
  for (int j : indices) {
    const std::string t = FormatDouble(q.grid().TimeAt(j));
    const ParticleMeasure marginal = q.MarginalAt(j);
    for (const Atom& a : marginal.atoms()) {
      out += t;
      out += ',';
      AppendCoords(domain, domain.coordinates(a.location), &out);
      out += ',';
      out += FormatDouble(a.weight);
      out += '\n';
    }
  }
  return out;
}

std::string ValueFieldCsv(const SpatialDomain& domain, const ValueField& phi,
                          const std::vector<int>& indices) {
  std::string out = "t," + CoordHeader(domain) + ",phi\n";
  for (int j : indices) {
    const std::string t = FormatDouble(phi.grid().TimeAt(j));
    for (std::size_t x = 0; x < phi.nodes(); ++x) {
      out += t;
      out += ',';
      AppendCoords(domain, domain.coordinates(static_cast<NodeId>(x)), &out);
      out += ',';
      out += FormatDouble(phi.at(j, static_cast<NodeId>(x)));
      out += '\n';
    }
  }
  return out;
}

std::string HistoryCsv(const std::vector<IterationRecord>& history) {
  std::string out = "iteration,epsilon,max_gap,lambda,members\n";
  for (const IterationRecord& r : history) {
    out += std::to_string(r.iteration) + ',' + FormatDouble(r.epsilon) + ',' +
           FormatDouble(r.max_gap) + ',' + FormatDouble(r.lambda) + ',' +
           std::to_string(r.members) + '\n';
  }
  return out;
}

std::string CurveCsv(const ConvergenceCurve& curve) {
  std::string out = "t,W_p,bound\n";
  for (std::size_t i = 0; i < curve.times.size(); ++i) {
    out += FormatDouble(curve.times[i]) + ',' + FormatDouble(curve.values[i]) +
           ',' + FormatDouble(curve.bounds[i]) + '\n';
  }
  return out;
}

}  // namespace exitmfg
