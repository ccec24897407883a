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

#ifndef EXITMFG_HYPOTHESES_H_
#define EXITMFG_HYPOTHESES_H_

#include <string>
#include <vector>

namespace exitmfg {

// Outcome of one structural or numerical check. `measured` and `threshold`
// are the quantities that were compared, when there are any.
struct Check {
  std::string id;
  bool passed = true;
  double measured = 0.0;
  double threshold = 0.0;
  std::string detail;
};

class HypothesisReport {
 public:
  void Add(Check check) { checks_.push_back(std::move(check)); }
  void Append(const HypothesisReport& other);

  bool AllPassed() const;
  const std::vector<Check>& checks() const { return checks_; }
  // nullptr when no check carries that id.
  const Check* Find(const std::string& id) const;
  std::vector<std::string> FailedIds() const;
  std::string Summary() const;

 private:
  std::vector<Check> checks_;
};

// Ledger of verification checks recorded during a solve.
using CheckLedger = HypothesisReport;

}  // namespace exitmfg

#endif  // EXITMFG_HYPOTHESES_H_
