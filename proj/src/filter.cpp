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

#include "sizeprobe/filter.hpp"

#include <fstream>
#include <sstream>

#include "sizeprobe/subprocess.hpp"

namespace sizeprobe {

namespace {

std::vector<std::string> toLines(const std::string& text) {
  std::vector<std::string> lines;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) lines.push_back(line);
  return lines;
}

FilterEvidence evidence(const std::string& filter, FilterVerdict verdict, bool required,
                        std::string detail, std::optional<int> reject_step = std::nullopt) {
  FilterEvidence e;
  e.filter = filter;
  e.verdict = verdict;
  e.required = required;
  e.detail = std::move(detail);
  e.reject_step = reject_step;
  return e;
}

}  // namespace

MonotonicVerdict monotonicSizeFilter(const std::vector<long long>& sizes, bool any_decrease) {
  MonotonicVerdict result;
  if (sizes.size() < 2) return result;
  long long baseline = sizes.front();
  for (std::size_t k = 1; k < sizes.size(); ++k) {
    bool drop = any_decrease ? sizes[k] < sizes[k - 1] : sizes[k] < baseline;
    if (drop) {
      result.verdict = FilterVerdict::Reject;
      result.reject_step = static_cast<int>(k);
      return result;
    }
  }
  return result;
}

std::vector<int> addedLines(const std::string& previous_code, const std::string& new_code) {
  std::vector<std::string> a = toLines(previous_code);
  std::vector<std::string> b = toLines(new_code);
  std::size_t n = a.size();
  std::size_t m = b.size();

  // Classic LCS table; mutants are small enough that quadratic is fine.
  std::vector<std::vector<int>> lcs(n + 1, std::vector<int>(m + 1, 0));
  for (std::size_t i = n; i-- > 0;) {
    for (std::size_t j = m; j-- > 0;) {
      lcs[i][j] = a[i] == b[j] ? lcs[i + 1][j + 1] + 1
                               : std::max(lcs[i + 1][j], lcs[i][j + 1]);
    }
  }

  std::vector<int> added;
  std::size_t i = 0;
  std::size_t j = 0;
  while (i < n && j < m) {
    if (a[i] == b[j]) {
      ++i;
      ++j;
    } else if (lcs[i + 1][j] >= lcs[i][j + 1]) {
      ++i;  // deleted line
    } else {
      added.push_back(static_cast<int>(j + 1));
      ++j;
    }
  }
  while (j < m) added.push_back(static_cast<int>(++j));
  return added;
}

FilterEvidence deadCodeFilter(const ViolationCandidate& candidate,
                              const std::string& previous_code,
                              const LanguageProfile& profile, const ValidationTools& tools,
                              const std::filesystem::path& scratch_dir,
                              const FilterConfig& config) {
  const char* kName = "dead_code";
  if (candidate.strategy != Strategy::DeadCode) {
    return evidence(kName, FilterVerdict::Skipped, false,
                    "candidate makes no deadness claim");
  }
  bool required = config.require_dead_code_filter;
  if (tools.coverage_invocation.empty()) {
    return evidence(kName, FilterVerdict::Skipped, required,
                    "no coverage-capable toolchain configured");
  }

  DriverProgram driver;
  try {
    driver = synthesizeDriver(candidate.program, profile);
  } catch (const Error& e) {
    if (e.code() == Errc::SignatureCorrupted) {
      return evidence(kName, FilterVerdict::Reject, required, e.what());
    }
    throw;
  }

  CoverageReport report = lineCoverage(driver, profile, tools, scratch_dir);
  if (report.status == CoverageStatus::ToolMissing) {
    return evidence(kName, FilterVerdict::Skipped, required, report.detail);
  }
  if (report.status == CoverageStatus::BuildFailed) {
    return evidence(kName, FilterVerdict::Reject, required,
                    "coverage build failed: " + report.detail);
  }
  if (!report.terminated) {
    return evidence(kName, FilterVerdict::Reject, required,
                    "program did not terminate within " +
                        std::to_string(tools.run_timeout) + "s");
  }

  std::vector<int> added = addedLines(previous_code, candidate.program.code);
  for (int mutant_line : added) {
    if (mutant_line <= 0 || mutant_line > static_cast<int>(driver.line_map.size())) continue;
    int driver_line = driver.line_map[mutant_line - 1];
    if (driver_line == 0) continue;  // stripped by the driver wrapper
    auto it = report.line_counts.find(driver_line);
    long long count = it == report.line_counts.end() ? 0 : it->second;
    if (count > 0) {
      return evidence(kName, FilterVerdict::Reject, required,
                      "live code: added line " + std::to_string(mutant_line) + " executed " +
                          std::to_string(count) + " times",
                      mutant_line);
    }
  }
  return evidence(kName, FilterVerdict::Pass, required,
                  "all " + std::to_string(added.size()) + " added lines have count 0");
}

FilterEvidence sanitizerFilter(const ViolationCandidate& candidate,
                               const LanguageProfile& profile, const ValidationTools& tools,
                               const std::filesystem::path& scratch_dir) {
  const char* kName = "sanitizer";
  if (tools.sanitizer_invocation.empty()) {
    return evidence(kName, FilterVerdict::Skipped, false,
                    "no sanitizer-capable toolchain configured");
  }

  DriverProgram driver;
  try {
    driver = synthesizeDriver(candidate.program, profile);
  } catch (const Error& e) {
    if (e.code() == Errc::SignatureCorrupted) {
      return evidence(kName, FilterVerdict::Reject, false, e.what());
    }
    throw;
  }

  SanitizeOutcome outcome = runSanitized(driver, profile, tools, scratch_dir);
  switch (outcome.verdict) {
    case SanitizeVerdict::Clean:
      return evidence(kName, FilterVerdict::Pass, false, "clean run");
    case SanitizeVerdict::Unavailable:
      return evidence(kName, FilterVerdict::Skipped, false, outcome.report);
    case SanitizeVerdict::Timeout:
      return evidence(kName, FilterVerdict::Reject, false, outcome.report);
    case SanitizeVerdict::BuildFailed:
      return evidence(kName, FilterVerdict::Reject, false,
                      "sanitizer build failed: " + outcome.report);
    case SanitizeVerdict::Flagged:
      return evidence(kName, FilterVerdict::Reject, false, outcome.report);
  }
  return evidence(kName, FilterVerdict::Reject, false, "unreachable");
}

FilterEvidence externalValidatorFilter(const ViolationCandidate& candidate,
                                       const LanguageProfile& profile,
                                       const ValidationTools& tools,
                                       const std::filesystem::path& scratch_dir) {
  const char* kName = "external_validator";
  if (tools.external_validator_command.empty()) {
    return evidence(kName, FilterVerdict::Skipped, false, "not configured");
  }

  DriverProgram driver;
  try {
    driver = synthesizeDriver(candidate.program, profile);
  } catch (const Error& e) {
    if (e.code() == Errc::SignatureCorrupted) {
      return evidence(kName, FilterVerdict::Reject, false, e.what());
    }
    throw;
  }

  std::filesystem::create_directories(scratch_dir);
  std::filesystem::path input = scratch_dir / ("validate" + profile.source_extension);
  {
    std::ofstream out(input);
    out << driver.program.code;
  }
  std::string command = substitutePlaceholders(tools.external_validator_command,
                                               {{"input", input.string()}});
  RunResult run = runCommand(splitCommand(command), tools.run_timeout);
  if (run.spawn_failed) {
    throw Error(Errc::ToolchainMissing, "cannot execute external validator: " + command);
  }
  if (run.timed_out) {
    return evidence(kName, FilterVerdict::Reject, false,
                    "validator did not finish within " + std::to_string(tools.run_timeout) +
                        "s");
  }
  if (run.exit_code != 0) {
    std::string report = run.err.empty() ? run.out : run.err;
    return evidence(kName, FilterVerdict::Reject, false,
                    report.empty() ? "validator exited " + std::to_string(run.exit_code)
                                   : report);
  }
  return evidence(kName, FilterVerdict::Pass, false, "validator clean");
}

FilterOutcome runFilterPipeline(const ViolationCandidate& candidate,
                                const std::vector<long long>& reference_sizes,
                                const std::string& previous_code,
                                const LanguageProfile& profile, const ValidationTools& tools,
                                const std::filesystem::path& scratch_dir,
                                const FilterConfig& config) {
  FilterOutcome outcome;

  MonotonicVerdict monotonic = monotonicSizeFilter(reference_sizes,
                                                   config.monotonic_any_decrease);
  if (monotonic.verdict == FilterVerdict::Reject) {
    outcome.evidence.push_back(evidence(
        "monotonic_size", FilterVerdict::Reject, true,
        "size dropped at step " + std::to_string(monotonic.reject_step) +
            "; additive mutations should never shrink code (suspected undefined behavior)",
        monotonic.reject_step));
  } else {
    outcome.evidence.push_back(
        evidence("monotonic_size", FilterVerdict::Pass, true, "no drop below the baseline"));
  }

  outcome.evidence.push_back(
      sanitizerFilter(candidate, profile, tools, scratch_dir / "sanitize"));
  if (!tools.external_validator_command.empty()) {
    outcome.evidence.push_back(
        externalValidatorFilter(candidate, profile, tools, scratch_dir / "validator"));
  }
  outcome.evidence.push_back(deadCodeFilter(candidate, previous_code, profile, tools,
                                            scratch_dir / "coverage", config));

  outcome.passed = true;
  for (const auto& e : outcome.evidence) {
    if (e.verdict == FilterVerdict::Reject) outcome.passed = false;
    if (e.verdict == FilterVerdict::Skipped && e.required) outcome.passed = false;
  }
  return outcome;
}

}  // namespace sizeprobe
