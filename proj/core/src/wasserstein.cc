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

#include "exitmfg/wasserstein.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <utility>
#include <vector>

#include "exitmfg/errors.h"

namespace exitmfg {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kMassEps = 1e-15;

void CheckInputs(const ParticleMeasure& mu, const ParticleMeasure& nu, int p) {
  if (p != 1 && p != 2) {
    throw PreconditionError("Wasserstein order must be 1 or 2");
  }
  mu.RequireNormalized("first measure");
  nu.RequireNormalized("second measure");
}

double Power(double d, int p) { return p == 1 ? d : d * d; }

double Root(double cost, int p) {
  cost = std::max(cost, 0.0);
  return p == 1 ? cost : std::sqrt(cost);
}

}  // namespace

double Wasserstein(const SpatialDomain& domain, const ParticleMeasure& mu,
                   const ParticleMeasure& nu, int p) {
  if (domain.kind() == BackendKind::kInterval) {
    return WassersteinQuantile1d(domain, mu, nu, p);
  }
  return WassersteinExact(domain, mu, nu, p);
}

double WassersteinQuantile1d(const SpatialDomain& domain,
                             const ParticleMeasure& mu,
                             const ParticleMeasure& nu, int p) {
  if (domain.kind() != BackendKind::kInterval) {
    throw PreconditionError("quantile coupling requires the interval backend");
  }
  CheckInputs(mu, nu, p);
  auto line = [&](const ParticleMeasure& m) {
    std::vector<std::pair<double, double>> out;
    out.reserve(m.size());
    for (const Atom& a : m.atoms()) {
      out.emplace_back(domain.coordinates(a.location)[0], a.weight);
    }
    std::sort(out.begin(), out.end());
    return out;
  };
  const auto a = line(mu);
  const auto b = line(nu);
  std::size_t i = 0;
  std::size_t j = 0;
  double ra = a[0].second;
  double rb = b[0].second;
  double cost = 0.0;
  while (i < a.size() && j < b.size()) {
    const double c = Power(std::abs(a[i].first - b[j].first), p);
    if (ra < rb) {
      cost += ra * c;
      rb -= ra;
      if (++i < a.size()) ra = a[i].second;
    } else {
      cost += rb * c;
      ra -= rb;
      if (++j < b.size()) rb = b[j].second;
    }
  }
  return Root(cost, p);
}

double WassersteinExact(const SpatialDomain& domain, const ParticleMeasure& mu,
                        const ParticleMeasure& nu, int p) {
  CheckInputs(mu, nu, p);
  const std::size_t n = mu.size();
  const std::size_t m = nu.size();
  if (n > kMaxExactSupport || m > kMaxExactSupport) {
    throw SupportSizeError(
        "exact transport supports at most 512 atoms per measure (got " +
        std::to_string(n) + " and " + std::to_string(m) +
        "); reduce the support or project to a histogram");
  }
  std::vector<double> cost(n * m);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < m; ++j) {
      cost[i * m + j] = Power(
          domain.Distance(mu.atoms()[i].location, nu.atoms()[j].location), p);
    }
  }
  std::vector<double> supply(n);
  std::vector<double> demand(m);
  for (std::size_t i = 0; i < n; ++i) supply[i] = mu.atoms()[i].weight;
  for (std::size_t j = 0; j < m; ++j) demand[j] = nu.atoms()[j].weight;
  std::vector<double> flow(n * m, 0.0);
  std::vector<double> hu(n, 0.0);
  std::vector<double> hv(m, 0.0);

  std::vector<double> du(n);
  std::vector<double> dv(m);
  std::vector<long> parent_u(n);
  std::vector<long> parent_v(m);
  std::vector<char> done_u(n);
  std::vector<char> done_v(m);

  for (;;) {
    bool any_supply = false;
    for (std::size_t i = 0; i < n; ++i) {
      du[i] = supply[i] > kMassEps ? 0.0 : kInf;
      any_supply |= supply[i] > kMassEps;
      parent_u[i] = -1;
      done_u[i] = 0;
    }
    if (!any_supply) break;
    std::fill(dv.begin(), dv.end(), kInf);
    std::fill(parent_v.begin(), parent_v.end(), -1);
    std::fill(done_v.begin(), done_v.end(), 0);
    long sink = -1;
    double sink_dist = kInf;
    for (;;) {
      double best = kInf;
      long best_u = -1;
      long best_v = -1;
      for (std::size_t i = 0; i < n; ++i) {
        if (!done_u[i] && du[i] < best) {
          best = du[i];
          best_u = static_cast<long>(i);
        }
      }
      for (std::size_t j = 0; j < m; ++j) {
        if (!done_v[j] && dv[j] < best) {
          best = dv[j];
          best_u = -1;
          best_v = static_cast<long>(j);
        }
      }
      if (best_u < 0 && best_v < 0) break;
      if (best_u >= 0) {
        const std::size_t i = best_u;
        done_u[i] = 1;
        for (std::size_t j = 0; j < m; ++j) {
          if (done_v[j]) continue;
          const double rc = std::max(0.0, cost[i * m + j] + hu[i] - hv[j]);
          if (du[i] + rc < dv[j]) {
            dv[j] = du[i] + rc;
            parent_v[j] = best_u;
          }
        }
      } else {
        const std::size_t j = best_v;
        done_v[j] = 1;
        if (demand[j] > kMassEps) {
          sink = best_v;
          sink_dist = dv[j];
          break;
        }
        for (std::size_t i = 0; i < n; ++i) {
          if (done_u[i] || flow[i * m + j] <= kMassEps) continue;
          const double rc = std::max(0.0, -cost[i * m + j] - hu[i] + hv[j]);
          if (dv[j] + rc < du[i]) {
            du[i] = dv[j] + rc;
            parent_u[i] = best_v;
          }
        }
      }
    }
    if (sink < 0) break;
    for (std::size_t i = 0; i < n; ++i) hu[i] += std::min(du[i], sink_dist);
    for (std::size_t j = 0; j < m; ++j) hv[j] += std::min(dv[j], sink_dist);

    double amount = demand[sink];
    long j = sink;
    long i = parent_v[j];
    for (;;) {
      if (parent_u[i] < 0) {
        amount = std::min(amount, supply[i]);
        break;
      }
      const long back = parent_u[i];
      amount = std::min(amount, flow[i * m + back]);
      j = back;
      i = parent_v[j];
    }
    j = sink;
    i = parent_v[j];
    demand[sink] -= amount;
    for (;;) {
      flow[i * m + j] += amount;
      if (parent_u[i] < 0) {
        supply[i] -= amount;
        break;
      }
      const long back = parent_u[i];
      flow[i * m + back] -= amount;
      j = back;
      i = parent_v[j];
    }
  }
  double total = 0.0;
  for (std::size_t k = 0; k < n * m; ++k) {
    if (flow[k] > 0.0) total += flow[k] * cost[k];
  }
  return Root(total, p);
}

}  // namespace exitmfg
