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

#include "sizeprobe/strategy.hpp"

#include <algorithm>
#include <string>

namespace sizeprobe {

namespace {

std::string fractionText(const Fraction& f) {
  return std::to_string(f.num) + "/" + std::to_string(f.den);
}

std::string sizeText(const SizeRef& ref, int step) {
  return "size_step" + std::to_string(step) + "(" + ref.compiler_id + ", " + ref.opt_flag +
         ") = " + std::to_string(ref.size);
}

ViolationCandidate makeCandidate(Strategy strategy, const SourceProgram& program,
                                 SizeRef baseline, SizeRef offender, Fraction threshold,
                                 std::string inequality) {
  ViolationCandidate candidate;
  candidate.strategy = strategy;
  candidate.program = program;
  candidate.baseline = baseline;
  candidate.offender = offender;
  candidate.ratio = Ratio{offender.size, baseline.size};
  candidate.threshold = threshold;
  candidate.inequality = std::move(inequality);
  return candidate;
}

bool exceeds(long long offender, long long baseline, const Fraction& threshold) {
  if (baseline <= 0) return false;  // degenerate baseline: candidate discarded
  return thresholdExceeded(offender, baseline, threshold);
}

}  // namespace

std::optional<ViolationCandidate> deadCodeCheck(const CompileOutcome& step_outcome,
                                                const CompileOutcome& baseline_outcome,
                                                const SourceProgram& program) {
  if (!step_outcome.success || !baseline_outcome.success) return std::nullopt;
  if (!step_outcome.size || !baseline_outcome.size) return std::nullopt;

  SizeRef baseline{baseline_outcome.compiler_id, baseline_outcome.opt_flag,
                   baseline_outcome.size->value};
  SizeRef offender{step_outcome.compiler_id, step_outcome.opt_flag,
                   step_outcome.size->value};
  // Only dead code was added, so the generated code must not grow at all:
  // strict comparison, zero threshold.
  Fraction threshold{0, 1};
  if (!exceeds(offender.size, baseline.size, threshold)) return std::nullopt;

  std::string inequality = sizeText(offender, program.step_index) + " > " +
                           sizeText(baseline, 0);
  return makeCandidate(Strategy::DeadCode, program, baseline, offender, threshold,
                       std::move(inequality));
}

std::optional<ViolationCandidate> pipelineCheck(const std::vector<CompileOutcome>& outcomes,
                                                const std::string& size_flag,
                                                Fraction threshold,
                                                const SourceProgram& program) {
  const CompileOutcome* at_size_flag = nullptr;
  const CompileOutcome* best_other = nullptr;
  for (const auto& outcome : outcomes) {
    if (!outcome.success || !outcome.size) return std::nullopt;
    if (outcome.opt_flag == size_flag) {
      at_size_flag = &outcome;
    } else if (best_other == nullptr || outcome.size->value < best_other->size->value ||
               (outcome.size->value == best_other->size->value &&
                outcome.opt_flag < best_other->opt_flag)) {
      best_other = &outcome;
    }
  }
  if (at_size_flag == nullptr || best_other == nullptr) return std::nullopt;

  SizeRef baseline{best_other->compiler_id, best_other->opt_flag, best_other->size->value};
  SizeRef offender{at_size_flag->compiler_id, at_size_flag->opt_flag,
                   at_size_flag->size->value};
  if (!exceeds(offender.size, baseline.size, threshold)) return std::nullopt;

  std::string inequality = "size(" + offender.compiler_id + ", " + offender.opt_flag +
                           ") = " + std::to_string(offender.size) + " > size(" +
                           baseline.compiler_id + ", " + baseline.opt_flag + ") = " +
                           std::to_string(baseline.size) + " * (1 + " +
                           fractionText(threshold) + ")";
  return makeCandidate(Strategy::Pipeline, program, baseline, offender, threshold,
                       std::move(inequality));
}

std::optional<ViolationCandidate> versionCheck(
    const std::vector<std::pair<CompilerSpec, CompileOutcome>>& ordered_versions,
    Fraction threshold, const SourceProgram& program) {
  if (ordered_versions.size() < 2) return std::nullopt;
  if (ordered_versions.back().first.channel != Channel::Trunk) return std::nullopt;
  for (const auto& [spec, outcome] : ordered_versions) {
    if (!outcome.success || !outcome.size) return std::nullopt;
  }

  const auto& trunk = ordered_versions.back();
  // Minimum over every released version, so a progression followed by a
  // regression is still caught. Oldest wins ties for a stable baseline.
  const std::pair<CompilerSpec, CompileOutcome>* best_release = nullptr;
  for (std::size_t i = 0; i + 1 < ordered_versions.size(); ++i) {
    const auto& entry = ordered_versions[i];
    if (best_release == nullptr ||
        entry.second.size->value < best_release->second.size->value) {
      best_release = &entry;
    }
  }
  if (best_release == nullptr) return std::nullopt;

  SizeRef baseline{best_release->second.compiler_id, best_release->second.opt_flag,
                   best_release->second.size->value};
  SizeRef offender{trunk.second.compiler_id, trunk.second.opt_flag,
                   trunk.second.size->value};
  if (!exceeds(offender.size, baseline.size, threshold)) return std::nullopt;

  std::string inequality = "size(" + offender.compiler_id + " [trunk], " + offender.opt_flag +
                           ") = " + std::to_string(offender.size) + " > size(" +
                           baseline.compiler_id + " [" + best_release->first.version_label +
                           "], " + baseline.opt_flag + ") = " + std::to_string(baseline.size) +
                           " * (1 + " + fractionText(threshold) + ")";
  return makeCandidate(Strategy::SingleCompiler, program, baseline, offender, threshold,
                       std::move(inequality));
}

std::optional<ViolationCandidate> multiCompilerCheck(
    const std::vector<std::pair<CompilerSpec, CompileOutcome>>& outcomes, Fraction threshold,
    const SourceProgram& program) {
  if (outcomes.size() < 2) return std::nullopt;
  const CompileOutcome* smallest = nullptr;
  const CompileOutcome* largest = nullptr;
  for (const auto& [spec, outcome] : outcomes) {
    if (!outcome.success || !outcome.size) return std::nullopt;
    if (smallest == nullptr || outcome.size->value < smallest->size->value ||
        (outcome.size->value == smallest->size->value &&
         outcome.compiler_id < smallest->compiler_id)) {
      smallest = &outcome;
    }
    if (largest == nullptr || outcome.size->value > largest->size->value ||
        (outcome.size->value == largest->size->value &&
         outcome.compiler_id < largest->compiler_id)) {
      largest = &outcome;
    }
  }

  SizeRef baseline{smallest->compiler_id, smallest->opt_flag, smallest->size->value};
  SizeRef offender{largest->compiler_id, largest->opt_flag, largest->size->value};
  if (!exceeds(offender.size, baseline.size, threshold)) return std::nullopt;

  std::string inequality = "size(" + offender.compiler_id + ", " + offender.opt_flag +
                           ") = " + std::to_string(offender.size) + " > size(" +
                           baseline.compiler_id + ", " + baseline.opt_flag + ") = " +
                           std::to_string(baseline.size) + " * (1 + " +
                           fractionText(threshold) + ")";
  return makeCandidate(Strategy::MultiCompiler, program, baseline, offender, threshold,
                       std::move(inequality));
}

bool candidateRecheck(const ViolationCandidate& candidate) {
  if (candidate.baseline.size <= 0) return false;
  return thresholdExceeded(candidate.offender.size, candidate.baseline.size,
                           candidate.threshold);
}

std::vector<std::pair<CompilerSpec, std::string>> strategyCompileSet(
    Strategy strategy, const std::vector<CompilerSpec>& compilers) {
  std::vector<std::pair<CompilerSpec, std::string>> set;
  if (compilers.empty()) return set;
  switch (strategy) {
    case Strategy::DeadCode:
      set.emplace_back(compilers.front(), compilers.front().size_opt_flag);
      break;
    case Strategy::Pipeline: {
      const CompilerSpec& compiler = compilers.front();
      set.emplace_back(compiler, compiler.size_opt_flag);
      set.emplace_back(compiler, compiler.perf_opt_flag);
      for (const auto& flag : compiler.extra_opt_flags) {
        set.emplace_back(compiler, flag);
      }
      break;
    }
    case Strategy::SingleCompiler:
    case Strategy::MultiCompiler:
      for (const auto& compiler : compilers) {
        set.emplace_back(compiler, compiler.size_opt_flag);
      }
      break;
  }
  return set;
}

std::optional<ViolationCandidate> evaluateStrategy(
    const StrategyConfig& config, const std::vector<CompilerSpec>& compilers,
    const std::vector<CompileOutcome>& step_outcomes,
    const std::vector<CompileOutcome>& baseline_outcomes, const SourceProgram& program) {
  switch (config.strategy) {
    case Strategy::DeadCode:
      if (step_outcomes.empty() || baseline_outcomes.empty()) return std::nullopt;
      return deadCodeCheck(step_outcomes.front(), baseline_outcomes.front(), program);
    case Strategy::Pipeline:
      if (compilers.empty()) return std::nullopt;
      return pipelineCheck(step_outcomes, compilers.front().size_opt_flag,
                           config.pipeline_threshold, program);
    case Strategy::SingleCompiler: {
      std::vector<std::pair<CompilerSpec, CompileOutcome>> versions;
      for (std::size_t i = 0; i < compilers.size() && i < step_outcomes.size(); ++i) {
        versions.emplace_back(compilers[i], step_outcomes[i]);
      }
      return versionCheck(versions, config.single_compiler_threshold, program);
    }
    case Strategy::MultiCompiler: {
      std::vector<std::pair<CompilerSpec, CompileOutcome>> entries;
      for (std::size_t i = 0; i < compilers.size() && i < step_outcomes.size(); ++i) {
        entries.emplace_back(compilers[i], step_outcomes[i]);
      }
      return multiCompilerCheck(entries, config.multi_compiler_threshold, program);
    }
  }
  return std::nullopt;
}

}  // namespace sizeprobe
