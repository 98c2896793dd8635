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

#ifndef SIZEPROBE_STRATEGY_HPP_
#define SIZEPROBE_STRATEGY_HPP_

#include <optional>
#include <vector>

#include "sizeprobe/core.hpp"

namespace sizeprobe {

// Per-session differential testing configuration. One strategy stays active
// for the whole session.
struct StrategyConfig {
  Strategy strategy = Strategy::MultiCompiler;
  Fraction pipeline_threshold = Fraction{1, 20};         // 5%
  Fraction multi_compiler_threshold = Fraction{1, 10};   // 10%
  // Any strict trunk regression triggers by default; raise to cut noise.
  Fraction single_compiler_threshold = Fraction{0, 1};
  // Flag whose per-step sizes feed the monotonic-size filter; empty means
  // the compiler's size-minimizing flag.
  std::string reference_opt_flag;
};

// All four checks are pure: same outcomes and config, same verdict. They
// return nothing when a precondition fails (an unsuccessful outcome, a
// degenerate zero-size baseline) so a step is skipped rather than aborted.

// Same compiler and flags as the step-0 baseline: any size growth after
// dead-only mutations means the compiler failed to prove the additions dead.
// No second compiler involved.
std::optional<ViolationCandidate> deadCodeCheck(const CompileOutcome& step_outcome,
                                                const CompileOutcome& baseline_outcome,
                                                const SourceProgram& program);

// One compiler, its size-minimizing flag against every other configured
// flag: the size pipeline must not lose to pipelines that do not even
// optimize for size (beyond the sensitivity threshold).
std::optional<ViolationCandidate> pipelineCheck(const std::vector<CompileOutcome>& outcomes,
                                                const std::string& size_flag,
                                                Fraction threshold,
                                                const SourceProgram& program);

// Ordered versions of one compiler family, newest entry the trunk build:
// trunk regressing against the best released size triggers.
std::optional<ViolationCandidate> versionCheck(
    const std::vector<std::pair<CompilerSpec, CompileOutcome>>& ordered_versions,
    Fraction threshold, const SourceProgram& program);

// Distinct compilers on the same program at their size flags: the largest
// output is the suspect when it exceeds the smallest by the threshold.
// Argmax/argmin ties break to the lexicographically smallest compiler id.
std::optional<ViolationCandidate> multiCompilerCheck(
    const std::vector<std::pair<CompilerSpec, CompileOutcome>>& outcomes, Fraction threshold,
    const SourceProgram& program);

// Re-evaluates a candidate's recorded inequality, used by report
// verification: every emitted candidate must satisfy its own triple.
bool candidateRecheck(const ViolationCandidate& candidate);

// The (compiler, flag) pairs a strategy compiles at every step. Dead-code
// and pipeline testing use the first matrix entry only; the version and
// multi-compiler strategies compile every entry at its size flag.
std::vector<std::pair<CompilerSpec, std::string>> strategyCompileSet(
    Strategy strategy, const std::vector<CompilerSpec>& compilers);

// Dispatches one step's outcomes (aligned with strategyCompileSet order) to
// the strategy's check. baseline_outcomes are the step-0 compiles, consumed
// by the dead-code strategy only.
std::optional<ViolationCandidate> evaluateStrategy(
    const StrategyConfig& config, const std::vector<CompilerSpec>& compilers,
    const std::vector<CompileOutcome>& step_outcomes,
    const std::vector<CompileOutcome>& baseline_outcomes, const SourceProgram& program);

}  // namespace sizeprobe

#endif  // SIZEPROBE_STRATEGY_HPP_
