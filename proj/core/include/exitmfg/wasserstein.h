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

#ifndef EXITMFG_WASSERSTEIN_H_
#define EXITMFG_WASSERSTEIN_H_

#include <cstddef>

#include "exitmfg/domain.h"
#include "exitmfg/measures.h"

namespace exitmfg {

// Largest support (per side) accepted by the exact transport solver.
inline constexpr std::size_t kMaxExactSupport = 512;

// W_p for p in {1, 2}. Uses the sorted quantile coupling on the interval
// backend and the exact transport LP otherwise.
double Wasserstein(const SpatialDomain& domain, const ParticleMeasure& mu,
                   const ParticleMeasure& nu, int p);

// Monotone rearrangement on the line. Interval backend only.
double WassersteinQuantile1d(const SpatialDomain& domain,
                             const ParticleMeasure& mu,
                             const ParticleMeasure& nu, int p);

// Exact optimal transport on the supports, solved as a min-cost flow with
// successive shortest paths. Throws SupportSizeError above kMaxExactSupport.
double WassersteinExact(const SpatialDomain& domain, const ParticleMeasure& mu,
                        const ParticleMeasure& nu, int p);

}  // namespace exitmfg

#endif  // EXITMFG_WASSERSTEIN_H_
