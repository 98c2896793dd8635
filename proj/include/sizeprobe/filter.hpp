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

#ifndef SIZEPROBE_FILTER_HPP_
#define SIZEPROBE_FILTER_HPP_

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "sizeprobe/core.hpp"
#include "sizeprobe/toolchain.hpp"

namespace sizeprobe {

struct FilterConfig {
  // When false, a candidate whose added lines grew the code is rejected only
  // if the size dropped below the step-0 baseline; when true, any strict
  // step-to-step decrease rejects.
  bool monotonic_any_decrease = false;
  // The dead-code strategy requires the coverage filter by default; with
  // this cleared a Skipped coverage record no longer blocks emission.
  bool require_dead_code_filter = true;
};

struct MonotonicVerdict {
  FilterVerdict verdict = FilterVerdict::Pass;
  int reject_step = -1;  // index into the size sequence
};

// Static heuristic over the per-step reference-flag sizes of an episode
// (step 0 first). Every catalogued mutation adds or complicates code, so a
// size falling below the seed baseline suggests the optimizer started
// deleting "unreachable" code, i.e. undefined behavior. Cheapest filter,
// applied first.
MonotonicVerdict monotonicSizeFilter(const std::vector<long long>& sizes,
                                     bool any_decrease = false);

// Line numbers (1-based, in the new file) of lines added between two
// versions of a program, from an LCS diff.
std::vector<int> addedLines(const std::string& previous_code, const std::string& new_code);

// Coverage check for dead-code-strategy candidates: every line the mutation
// added must have an execution count of zero and the driver must terminate.
// Skipped for other strategies (their candidates make no deadness claim) and
// when no coverage toolchain is configured.
FilterEvidence deadCodeFilter(const ViolationCandidate& candidate,
                              const std::string& previous_code,
                              const LanguageProfile& profile, const ValidationTools& tools,
                              const std::filesystem::path& scratch_dir,
                              const FilterConfig& config);

// Sanitizer screen over the driver-wrapped mutant.
FilterEvidence sanitizerFilter(const ViolationCandidate& candidate,
                               const LanguageProfile& profile, const ValidationTools& tools,
                               const std::filesystem::path& scratch_dir);

// Optional external validator hook (an undefined-behavior interpreter, for
// instance): runs the configured command on the driver-wrapped source and
// rejects on nonzero exit. Only part of the pipeline when configured.
FilterEvidence externalValidatorFilter(const ViolationCandidate& candidate,
                                       const LanguageProfile& profile,
                                       const ValidationTools& tools,
                                       const std::filesystem::path& scratch_dir);

struct FilterOutcome {
  bool passed = false;
  std::vector<FilterEvidence> evidence;  // monotonic, sanitizer, dead-code order
};

// Runs the fixed pipeline monotonic -> sanitizer -> dead-code over a
// candidate and decides emission: no Reject anywhere and no Skipped record
// on a required filter.
FilterOutcome runFilterPipeline(const ViolationCandidate& candidate,
                                const std::vector<long long>& reference_sizes,
                                const std::string& previous_code,
                                const LanguageProfile& profile, const ValidationTools& tools,
                                const std::filesystem::path& scratch_dir,
                                const FilterConfig& config);

}  // namespace sizeprobe

#endif  // SIZEPROBE_FILTER_HPP_
