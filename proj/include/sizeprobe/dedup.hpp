// Copyright 2026 The Sizeprobe Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef SIZEPROBE_DEDUP_HPP_
#define SIZEPROBE_DEDUP_HPP_

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "sizeprobe/core.hpp"

namespace sizeprobe {

// Outcome of re-running a violation's strategy check with one substituted
// compiler.
struct ExhibitResult {
  bool triggered = false;
  bool compiled = true;
  std::string note;
};

using ExhibitCheck = std::function<ExhibitResult(const CompilerSpec&)>;

// Re-checks the violation against each entry of an ordered (oldest to
// newest) release matrix. A version that fails to compile the test case is
// recorded as not exhibiting, with an annotation.
ViolationSignature releaseScreen(const std::vector<CompilerSpec>& release_matrix,
                                 const ExhibitCheck& check);

// Probe over an ordered revision range; nullopt marks a revision whose
// compiler could not be provisioned (skipped, search continues).
using RevisionProbe = std::function<std::optional<bool>(std::size_t index)>;

struct BisectResult {
  enum class Status { Found, NotBisectable } status = Status::NotBisectable;
  std::size_t first_bad_index = 0;
  int probes = 0;  // provider invocations, endpoint verification included
  std::string detail;
};

// Binary search for the first revision where the check triggers. The range
// must be false at its start and true at its end (verified first); anything
// else, including unavailable endpoints, is NotBisectable rather than a
// guessed culprit.
BisectResult bisectFirstTrue(std::size_t revision_count, const RevisionProbe& probe);

// Deterministic duplicate grouping: equal exhibits vectors share a group,
// equal culprit revisions share a group, and the two relations are closed
// under union. Returns one group id per signature, ids assigned in first-
// appearance order.
std::vector<int> groupSignatures(const std::vector<ViolationSignature>& signatures);

// Pairs whose exhibiting version sets overlap but are not equal: not merged
// (that likely means two different bugs), listed for triage.
std::vector<std::pair<int, int>> possiblyRelatedPairs(
    const std::vector<ViolationSignature>& signatures);

}  // namespace sizeprobe

#endif  // SIZEPROBE_DEDUP_HPP_
