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

#ifndef EXITMFG_REPORT_IO_H_
#define EXITMFG_REPORT_IO_H_

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "exitmfg/asymptotics.h"
#include "exitmfg/domain.h"
#include "exitmfg/equilibrium.h"
#include "exitmfg/measures.h"
#include "exitmfg/ocp.h"

namespace exitmfg {

// 12 significant digits; "inf", "-inf" and "nan" for non-finite values.
std::string FormatDouble(double v);
// v rounded to 12 significant digits.
double Round12(double v);

std::uint64_t Fnv1a64(std::string_view data);
std::string HexDigest(std::uint64_t digest);

// Throws ArtifactError naming the path on failure.
void WriteTextFile(const std::string& path, const std::string& content);
std::string ReadTextFile(const std::string& path);

// particle_id,weight,t,node,next,offset,x[,y],exited. Rows run from the first
// sample to the exit sample; trajectories are constant afterwards.
std::string TrajectoriesCsv(const SpatialDomain& domain,
                            const TrajectoryEnsemble& q);
// Inverse of TrajectoriesCsv. Weights are renormalized. Throws ArtifactError
// naming `file_name` on malformed or truncated content.
TrajectoryEnsemble ParseTrajectoriesCsv(const SpatialDomain& domain,
                                        const TimeGrid& grid,
                                        const std::string& text,
                                        const std::string& file_name);

// t,x[,y],weight for each marginal at the given sample indices.
std::string MarginalsCsv(const SpatialDomain& domain,
                         const TrajectoryEnsemble& q,
                         const std::vector<int>& indices);
// t,x[,y],phi at the given sample indices.
std::string ValueFieldCsv(const SpatialDomain& domain, const ValueField& phi,
                          const std::vector<int>& indices);
std::string HistoryCsv(const std::vector<IterationRecord>& history);
// t,W_p,bound.
std::string CurveCsv(const ConvergenceCurve& curve);

}  // namespace exitmfg

#endif  // EXITMFG_REPORT_IO_H_
