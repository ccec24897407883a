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

#ifndef EXITMFG_ERRORS_H_
#define EXITMFG_ERRORS_H_

#include <stdexcept>
#include <string>

namespace exitmfg {

// Base class of every error thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Unknown node, disconnected graph, malformed domain description.
class DomainError : public Error {
 public:
  using Error::Error;
};

// A caller broke an operation's precondition (unnormalized measure, bad
// arguments, mismatched grids).
class PreconditionError : public Error {
 public:
  using Error::Error;
};

// A modelling hypothesis (bounds on the speed, smallness of the exit-cost
// Lipschitz constant, ...) does not hold.
class HypothesisError : public Error {
 public:
  using Error::Error;
};

// The time horizon is too short for the requested computation.
class HorizonError : public Error {
 public:
  using Error::Error;
};

// Greedy trajectory synthesis got stuck before reaching the target.
class SynthesisStall : public Error {
 public:
  using Error::Error;
};

// A requested time or parameter lies outside the admissible range.
class RangeError : public Error {
 public:
  using Error::Error;
};

// Exact transport was requested on supports larger than the solver accepts.
class SupportSizeError : public Error {
 public:
  using Error::Error;
};

// A trajectory ensemble failed certification (e.g. inadmissible curves).
class CertificationError : public Error {
 public:
  using Error::Error;
};

// Invalid scenario file or registry name.
class ScenarioError : public Error {
 public:
  using Error::Error;
};

// Missing or corrupted run artifact.
class ArtifactError : public Error {
 public:
  using Error::Error;
};

}  // namespace exitmfg

#endif  // EXITMFG_ERRORS_H_
