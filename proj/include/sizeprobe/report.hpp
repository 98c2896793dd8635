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

#ifndef SIZEPROBE_REPORT_HPP_
#define SIZEPROBE_REPORT_HPP_

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "sizeprobe/config.hpp"
#include "sizeprobe/core.hpp"
#include "sizeprobe/dedup.hpp"

namespace sizeprobe {

// One recorded size observation in a report.
struct ReportSize {
  std::string compiler_id;
  std::string opt_flag;
  long long size = 0;
  int step = 0;  // 0 = seed baseline, otherwise the violating step
};

// A parsed violation report; self-contained enough to reproduce the decision
// with only local toolchains.
struct ReportData {
  int schema_version = 1;
  std::string language;
  Strategy strategy = Strategy::MultiCompiler;
  SizeMetric metric = SizeMetric::InstructionCount;
  std::string source;       // the violating mutant
  std::string seed_source;  // step-0 program
  int step_index = 0;
  std::vector<std::string> lineage;
  std::vector<CompilerSpec> compilers;
  std::vector<ReportSize> sizes;
  ViolationCandidate trigger;  // program field carries `source`
  std::vector<FilterEvidence> filter_evidence;
  std::optional<ViolationSignature> signature;
  std::string repro_script;
};

struct ReportPaths {
  std::filesystem::path json;
  std::filesystem::path script;
  std::filesystem::path mutant_source;
  std::filesystem::path seed_source;
};

// Writes <name>.json (canonical key order, so identical violations yield
// byte-identical files), <name>.sh, and the mutant/seed sources next to it.
ReportPaths emitReport(const Violation& violation,
                       const std::vector<CompileOutcome>& step_outcomes,
                       const std::vector<CompileOutcome>& baseline_outcomes,
                       const CampaignConfig& config, const std::filesystem::path& dir,
                       const std::string& name);

ReportData parseReportFile(const std::filesystem::path& path);

// Rewrites a report in place (after screening or bisection adds a
// signature).
void updateReportSignature(const std::filesystem::path& path,
                           const ViolationSignature& signature);

struct VerifyResult {
  bool arithmetic_ok = false;            // stored inequality holds
  std::optional<bool> recompiled_trigger;  // strategy re-check with local toolchains
  bool decision_matches = false;         // recomputed decision equals stored
  std::string detail;
};

// Recomputes the violation decision from the report: always the arithmetic
// route, plus a full recompile route when the recorded compilers resolve
// locally (or recompile is forced).
VerifyResult verifyReport(const ReportData& report, const std::filesystem::path& scratch_dir,
                          bool recompile);

// Re-runs the report's strategy check with `substitute` standing in for the
// offender compiler; the release-screening and bisection primitives build
// their probes from this.
ExhibitResult rerunCheckWithCompiler(const ReportData& report, const CompilerSpec& substitute,
                                     const std::filesystem::path& scratch_dir);

// Regression-corpus entry: a known-bug program checked against local
// compilers, informative only.
struct CorpusEntry {
  std::string file;
  std::string language;
  Strategy strategy = Strategy::MultiCompiler;
  std::string note;
  // Preferred matrix entry for single-compiler checks (the pipeline check
  // uses the first matrix entry; a bug specific to one compiler family wants
  // that family probed).
  std::string compiler_hint;
};

std::vector<CorpusEntry> loadCorpusManifest(const std::filesystem::path& path);

struct CorpusResult {
  CorpusEntry entry;
  enum class Status { Trigger, NoTrigger, Skipped } status = Status::Skipped;
  std::string detail;
};

// Runs each corpus entry's strategy check with the per-language matrices.
// Entries whose compilers are unavailable or fail to compile the program are
// Skipped; nothing here ever fails the caller.
std::vector<CorpusResult> checkCorpus(
    const std::vector<CorpusEntry>& entries, const std::filesystem::path& corpus_dir,
    const std::map<std::string, std::vector<CompilerSpec>>& matrices,
    const StrategyConfig& strategy_defaults, const std::filesystem::path& scratch_dir);

}  // namespace sizeprobe

#endif  // SIZEPROBE_REPORT_HPP_
