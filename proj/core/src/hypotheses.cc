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

#include "exitmfg/hypotheses.h"

#include <algorithm>

namespace exitmfg {

void HypothesisReport::Append(const HypothesisReport& other) {
  checks_.insert(checks_.end(), other.checks_.begin(), other.checks_.end());
}

bool HypothesisReport::AllPassed() const {
  return std::all_of(checks_.begin(), checks_.end(),
                     [](const Check& c) { return c.passed; });
}

const Check* HypothesisReport::Find(const std::string& id) const {
  for (const Check& c : checks_) {
    if (c.id == id) return &c;
  }
  return nullptr;
}

std::vector<std::string> HypothesisReport::FailedIds() const {
  std::vector<std::string> out;
  for (const Check& c : checks_) {
    if (!c.passed) out.push_back(c.id);
  }
  return out;
}

std::string HypothesisReport::Summary() const {
  std::string out;
  for (const Check& c : checks_) {
    out += c.passed ? "[ok]   " : "[FAIL] ";
    out += c.id;
    if (!c.detail.empty()) {
      out += ": ";
      out += c.detail;
    }
    out += "\n";
  }
  return out;
}

}  // namespace exitmfg
