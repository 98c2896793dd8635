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

#ifndef SIZEPROBE_CORE_HPP_
#define SIZEPROBE_CORE_HPP_

#include <cstdint>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace sizeprobe {

// ---------------------------------------------------------------------------
// Errors
// ---------------------------------------------------------------------------

enum class Errc {
  UnknownLanguage,
  NoEligibleInstruction,
  ProviderTimeout,
  ProviderUnavailable,
  ExtractionFailed,
  ToolchainMissing,
  CompileTimeout,
  SignatureCorrupted,
  DegenerateBaseline,
  NotBisectable,
  ConfigError,
  IoError,
};

const char* errcName(Errc code);

class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& message)
      : std::runtime_error(std::string(errcName(code)) + ": " + message),
        code_(code) {}

  Errc code() const { return code_; }

 private:
  Errc code_;
};

// ---------------------------------------------------------------------------
// Exact fractions and size ratios
//
// All threshold arithmetic is integer-exact so that boundary cases (say, 105
// vs 100 at 5%) never depend on float rounding and identical violations dedup
// to identical reports.
// ---------------------------------------------------------------------------

struct Fraction {
  long long num = 0;
  long long den = 1;

  // Parses a decimal such as 0.05 into 1/20, resolving at most six
  // fractional digits.
  static Fraction fromDecimal(double value);

  double asDouble() const { return static_cast<double>(num) / static_cast<double>(den); }
  bool operator==(const Fraction& other) const = default;
};

// Size ratio offender/baseline, kept as the raw integer pair.
struct Ratio {
  long long num = 0;
  long long den = 1;

  // "+36.0%" style growth rendering, one fractional digit, round half up.
  std::string percentDelta() const;
  bool operator==(const Ratio& other) const = default;
};

// True iff offender_size > baseline_size * (1 + threshold), evaluated in
// exact integer arithmetic. The comparison is strict so that landing exactly
// on the boundary never triggers.
//
// Throws Error(DegenerateBaseline) when baseline_size = 0: an empty baseline
// function makes any relative comparison meaningless and the candidate is
// discarded by the caller.
bool thresholdExceeded(long long offender_size, long long baseline_size,
                       const Fraction& threshold);

// 64-bit FNV-1a of a code blob, rendered as 16 hex chars. Used for program
// lineage digests, not for security.
std::string contentDigest(const std::string& text);

// ---------------------------------------------------------------------------
// Enums
// ---------------------------------------------------------------------------

enum class InstructionCategory {
  ControlFlow,
  Conditionals,
  AggregatesPointers,
  FunctionArguments,
};

enum class Deadness { Dead, Live };

enum class Channel { Release, Trunk };

enum class SizeMetric { InstructionCount, TextSectionBytes };

enum class Strategy { DeadCode, Pipeline, SingleCompiler, MultiCompiler };

const char* toString(InstructionCategory category);
const char* toString(Deadness deadness);
const char* toString(Channel channel);
const char* toString(SizeMetric metric);
const char* toString(Strategy strategy);

InstructionCategory categoryFromString(const std::string& name);
Deadness deadnessFromString(const std::string& name);
Channel channelFromString(const std::string& name);
SizeMetric metricFromString(const std::string& name);
Strategy strategyFromString(const std::string& name);

// ---------------------------------------------------------------------------
// Domain types
// ---------------------------------------------------------------------------

// One entry of the mutation instruction list: an imperative prompt fragment
// such as "add array code", tagged with its category and whether it asks for
// dead (never executed) code.
struct MutationInstruction {
  std::string id;
  InstructionCategory category = InstructionCategory::ControlFlow;
  std::string text;
  Deadness deadness = Deadness::Live;
  // Replacement fragment per language id, for languages where the default
  // phrasing names a feature the language lacks (unions, for one).
  std::map<std::string, std::string> per_language_text;

  const std::string& textFor(const std::string& language_id) const {
    auto it = per_language_text.find(language_id);
    return it == per_language_text.end() ? text : it->second;
  }
};

// Everything language-specific a campaign needs: the seed, how to wrap a
// mutant into a runnable program, and how to read its assembly.
struct LanguageProfile {
  std::string id;
  std::string display_name;
  std::string seed_code;
  std::string function_symbol = "f";
  std::string source_extension = ".c";
  // Driver template with {code} and {calls} placeholders; call_template with
  // {fn} and {value}. The driver calls the function under test once per
  // driver_inputs entry and accumulates results into a sink the optimizer
  // cannot delete.
  std::string driver_template;
  std::string call_template;
  std::vector<long long> driver_inputs = {-1, 0, 1, 10};
  // Lines removed from the mutant before wrapping (an inner no-entry-point
  // attribute cannot coexist with the generated entry point).
  std::vector<std::string> driver_strip;
  std::string asm_comment_leader = "#";
  // Keywords whose presence gates Conditionals-category instructions.
  std::vector<std::string> control_keywords = {"if", "for", "while"};
};

// A mutant with its lineage back to the seed.
struct SourceProgram {
  std::string language;
  std::string code;
  int step_index = 0;
  std::vector<std::string> lineage;  // instruction ids, in application order
  std::string parent_digest;
};

// One compiler configuration in the test matrix.
struct CompilerSpec {
  std::string id;
  // Command template with {input}, {output} and {flags} placeholders,
  // whitespace-split into argv (no shell).
  std::string invocation;
  std::string version_label;
  Channel channel = Channel::Release;
  std::string size_opt_flag = "-Os";
  std::string perf_opt_flag = "-O3";
  std::string other_flags;
  std::vector<std::string> extra_opt_flags;
  // Object-emitting variant of invocation; only needed for the
  // TextSectionBytes metric.
  std::string object_invocation;
};

struct SizeMeasurement {
  SizeMetric metric = SizeMetric::InstructionCount;
  long long value = 0;
};

// Result of one compiler run over one mutant.
struct CompileOutcome {
  std::string compiler_id;
  std::string opt_flag;
  bool success = false;
  std::string assembly;     // empty on failure
  std::string diagnostics;  // "timeout" on a timed-out run
  std::optional<SizeMeasurement> size;
  double wall_time = 0.0;
};

// (compiler, flag, size) corner of a violation inequality.
struct SizeRef {
  std::string compiler_id;
  std::string opt_flag;
  long long size = 0;
};

// A suspicious size delta, before false-positive filtering.
struct ViolationCandidate {
  Strategy strategy = Strategy::MultiCompiler;
  SourceProgram program;
  SizeRef baseline;
  SizeRef offender;
  Ratio ratio;                 // offender.size / baseline.size
  Fraction threshold;          // the sensitivity used when it triggered
  std::string inequality;      // human-readable restatement of the trigger
};

enum class FilterVerdict { Pass, Reject, Skipped };

struct FilterEvidence {
  std::string filter;
  FilterVerdict verdict = FilterVerdict::Skipped;
  bool required = false;
  std::string detail;
  std::optional<int> reject_step;
};

const char* toString(FilterVerdict verdict);
FilterVerdict filterVerdictFromString(const std::string& name);

// Per-released-version exhibition vector used to group violations caused by
// the same underlying defect.
struct ViolationSignature {
  std::vector<std::string> version_ids;
  std::vector<std::uint8_t> exhibits;  // aligned with version_ids, 0/1
  std::optional<std::string> culprit_revision;
  std::vector<std::string> annotations;  // per-version notes (compile failures)

  bool sameExhibits(const ViolationSignature& other) const {
    return version_ids == other.version_ids && exhibits == other.exhibits;
  }
};

// A candidate every enabled filter passed.
struct Violation {
  ViolationCandidate candidate;
  std::vector<FilterEvidence> filter_evidence;
  std::optional<ViolationSignature> signature;
  std::string report_path;
};

// Campaign-level aggregates, one row of the results table.
struct SessionStats {
  long long total_programs = 0;  // completed episodes
  long long compilable = 0;      // episodes not ended by a compile failure
  long long violations = 0;      // episodes ending in a confirmed violation
  int steps_min = 0;
  double steps_mean = 0.0;
  int steps_max = 0;
  // Filter health counters; a sanitizer rejection rate above 10% of
  // candidates is reported as a campaign-health warning.
  long long candidates_total = 0;
  long long candidates_rejected_sanitizer = 0;

  double compilableFraction() const {
    return total_programs == 0 ? 0.0
                               : static_cast<double>(compilable) / static_cast<double>(total_programs);
  }
  double violationFraction() const {
    return total_programs == 0 ? 0.0
                               : static_cast<double>(violations) / static_cast<double>(total_programs);
  }
};

}  // namespace sizeprobe

#endif  // SIZEPROBE_CORE_HPP_
