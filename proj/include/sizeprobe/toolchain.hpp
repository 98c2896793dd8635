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

#ifndef SIZEPROBE_TOOLCHAIN_HPP_
#define SIZEPROBE_TOOLCHAIN_HPP_

#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "sizeprobe/core.hpp"

namespace sizeprobe {

// Size metric selection. TextSectionBytes needs the compiler's
// object_invocation plus an external tool that prints the byte count.
struct MetricConfig {
  SizeMetric metric = SizeMetric::InstructionCount;
  std::string size_tool_command;  // "{input}" placeholder, prints an integer
};

// Validation tooling used by the false-positive filters. Empty invocations
// mean the capability is unavailable for the language and the corresponding
// filter records Skipped.
struct ValidationTools {
  std::string sanitizer_invocation;      // {input} {output}
  std::string coverage_invocation;       // {input} {output}, no-optimization build
  std::string coverage_report_command = "gcov {input}";
  // Optional extra validator (an undefined-behavior interpreter, say):
  // invoked with {input} = the driver-wrapped source; nonzero exit rejects
  // the candidate. Unset = not part of the pipeline.
  std::string external_validator_command;
  double compile_timeout = 30.0;
  double run_timeout = 5.0;
};

// Counts instructions in textual assembly: non-empty lines that are not
// labels (trailing ':'), directives (leading '.') or comments (leading
// comment marker). Insensitive to surrounding whitespace and blank lines.
long long measureInstructionCount(const std::string& assembly,
                                  const std::string& comment_leader);

SizeMeasurement measureSize(const std::string& assembly, SizeMetric metric,
                            const std::string& comment_leader);

// One compiler invocation over one program. Writes source and output inside
// scratch_dir only. Timeouts yield success=false with diagnostics "timeout";
// a missing compiler binary throws Error(ToolchainMissing).
CompileOutcome compileToAsm(const CompilerSpec& compiler, const std::string& opt_flag,
                            const SourceProgram& program, const LanguageProfile& profile,
                            const std::filesystem::path& scratch_dir, double timeout_seconds,
                            const MetricConfig& metric = {});

// A mutant wrapped with an entry point that calls the function under test
// once per driver input and accumulates results into a sink.
struct DriverProgram {
  SourceProgram program;
  int code_first_line = 1;     // 1-based driver line of the mutant's first kept line
  std::vector<int> line_map;   // mutant line (1-based) -> driver line; 0 = stripped
};

// Throws Error(SignatureCorrupted) when the mutant no longer defines the
// profile's function symbol.
DriverProgram synthesizeDriver(const SourceProgram& program, const LanguageProfile& profile);

enum class SanitizeVerdict { Clean, Flagged, Timeout, Unavailable, BuildFailed };

struct SanitizeOutcome {
  SanitizeVerdict verdict = SanitizeVerdict::Unavailable;
  std::string report;
};

const char* toString(SanitizeVerdict verdict);

// Builds the driver-wrapped program with sanitizers and runs it. Clean iff
// the binary exits zero with no sanitizer report within the run timeout.
SanitizeOutcome runSanitized(const DriverProgram& driver, const LanguageProfile& profile,
                             const ValidationTools& tools,
                             const std::filesystem::path& scratch_dir);

enum class CoverageStatus { Ok, BuildFailed, ToolMissing };

struct CoverageReport {
  CoverageStatus status = CoverageStatus::ToolMissing;
  std::map<int, long long> line_counts;  // driver source line -> execution count
  bool terminated = false;
  int exit_status = -1;
  std::string detail;
};

// Per-line execution counts of the driver source, built at the
// no-optimization level so the line mapping stays reliable. A run that does
// not terminate within the timeout reports terminated=false with no counts.
CoverageReport lineCoverage(const DriverProgram& driver, const LanguageProfile& profile,
                            const ValidationTools& tools,
                            const std::filesystem::path& scratch_dir);

// gcov text-format parser, exposed for tests. Non-executable lines ('-') are
// absent from the result; '#####'/'=====' parse as zero.
std::map<int, long long> parseGcovCounts(const std::string& gcov_text);

// Campaign-start preflight: every referenced binary resolves, the seed
// compiles on every matrix entry, and repeated compiles measure identically.
// Throws Error(ToolchainMissing) or Error(ConfigError).
void preflightToolchain(const std::vector<std::pair<CompilerSpec, std::string>>& compile_set,
                        const LanguageProfile& profile,
                        const std::filesystem::path& scratch_dir, double timeout_seconds,
                        const MetricConfig& metric = {});

}  // namespace sizeprobe

#endif  // SIZEPROBE_TOOLCHAIN_HPP_
