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

#include "sizeprobe/toolchain.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <sstream>

#include "sizeprobe/subprocess.hpp"

namespace sizeprobe {

namespace fs = std::filesystem;

namespace {

std::string trim(const std::string& text) {
  std::size_t first = 0;
  std::size_t last = text.size();
  while (first < last && std::isspace(static_cast<unsigned char>(text[first]))) ++first;
  while (last > first && std::isspace(static_cast<unsigned char>(text[last - 1]))) --last;
  return text.substr(first, last - first);
}

void writeFile(const fs::path& path, const std::string& content) {
  std::ofstream out(path);
  if (!out) {
    throw Error(Errc::IoError, "cannot write " + path.string());
  }
  out << content;
  if (!content.empty() && content.back() != '\n') out << '\n';
}

std::string readFile(const fs::path& path) {
  std::ifstream in(path);
  if (!in) return {};
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

std::string truncateDiag(const std::string& text) {
  constexpr std::size_t kLimit = 8192;
  if (text.size() <= kLimit) return text;
  return text.substr(0, kLimit) + "\n[truncated]";
}

bool symbolDefined(const std::string& code, const std::string& symbol) {
  auto is_ident = [](char c) {
    return std::isalnum(static_cast<unsigned char>(c)) || c == '_';
  };
  for (std::size_t pos = code.find(symbol); pos != std::string::npos;
       pos = code.find(symbol, pos + 1)) {
    bool left_ok = pos == 0 || !is_ident(code[pos - 1]);
    std::size_t after = pos + symbol.size();
    while (after < code.size() && std::isspace(static_cast<unsigned char>(code[after]))) {
      ++after;
    }
    if (left_ok && after < code.size() && code[after] == '(') return true;
  }
  return false;
}

}  // namespace

long long measureInstructionCount(const std::string& assembly,
                                  const std::string& comment_leader) {
  long long count = 0;
  std::istringstream in(assembly);
  std::string raw;
  while (std::getline(in, raw)) {
    std::string line = trim(raw);
    if (line.empty()) continue;
    if (line.front() == '.') continue;
    if (line.back() == ':') continue;
    if (!comment_leader.empty() && line.compare(0, comment_leader.size(), comment_leader) == 0)
      continue;
    ++count;
  }
  return count;
}

SizeMeasurement measureSize(const std::string& assembly, SizeMetric metric,
                            const std::string& comment_leader) {
  if (metric != SizeMetric::InstructionCount) {
    throw Error(Errc::ConfigError,
                "measureSize handles instruction_count only; text_section_bytes is "
                "delegated to the external size tool");
  }
  return SizeMeasurement{metric, measureInstructionCount(assembly, comment_leader)};
}

CompileOutcome compileToAsm(const CompilerSpec& compiler, const std::string& opt_flag,
                            const SourceProgram& program, const LanguageProfile& profile,
                            const fs::path& scratch_dir, double timeout_seconds,
                            const MetricConfig& metric) {
  if (program.code.empty()) {
    throw Error(Errc::ConfigError, "compileToAsm: empty program");
  }
  fs::create_directories(scratch_dir);

  bool object_mode = metric.metric == SizeMetric::TextSectionBytes;
  const std::string& invocation = object_mode ? compiler.object_invocation : compiler.invocation;
  if (invocation.empty()) {
    throw Error(Errc::ConfigError, "compiler '" + compiler.id + "' has no " +
                                       (object_mode ? "object_invocation" : "invocation"));
  }

  fs::path input = scratch_dir / ("src" + profile.source_extension);
  fs::path output = scratch_dir / (object_mode ? "out.o" : "out.s");
  writeFile(input, program.code);
  std::error_code ec;
  fs::remove(output, ec);

  std::string flags = opt_flag;
  if (!compiler.other_flags.empty()) flags += " " + compiler.other_flags;
  std::string command = substitutePlaceholders(
      invocation,
      {{"input", input.string()}, {"output", output.string()}, {"flags", flags}});

  CompileOutcome outcome;
  outcome.compiler_id = compiler.id;
  outcome.opt_flag = opt_flag;

  RunResult run = runCommand(splitCommand(command), timeout_seconds);
  outcome.wall_time = run.wall_seconds;
  if (run.spawn_failed) {
    throw Error(Errc::ToolchainMissing,
                "cannot execute '" + command + "' for compiler '" + compiler.id + "'");
  }
  if (run.timed_out) {
    outcome.success = false;
    outcome.diagnostics = "timeout";
    return outcome;
  }
  if (run.exit_code != 0) {
    outcome.success = false;
    outcome.diagnostics = truncateDiag(run.err.empty() ? run.out : run.err);
    if (outcome.diagnostics.empty()) {
      outcome.diagnostics = "compiler exited with status " + std::to_string(run.exit_code);
    }
    return outcome;
  }

  outcome.success = true;
  if (object_mode) {
    if (metric.size_tool_command.empty()) {
      throw Error(Errc::ConfigError,
                  "text_section_bytes metric requires a size tool command");
    }
    std::string size_cmd =
        substitutePlaceholders(metric.size_tool_command, {{"input", output.string()}});
    RunResult size_run = runCommand(splitCommand(size_cmd), timeout_seconds);
    if (size_run.spawn_failed || size_run.timed_out || size_run.exit_code != 0) {
      throw Error(Errc::ToolchainMissing, "size tool failed: " + size_cmd);
    }
    long long value = 0;
    try {
      value = std::stoll(trim(size_run.out));
    } catch (const std::exception&) {
      throw Error(Errc::ConfigError,
                  "size tool printed no integer: '" + trim(size_run.out) + "'");
    }
    outcome.size = SizeMeasurement{SizeMetric::TextSectionBytes, value};
  } else {
    outcome.assembly = readFile(output);
    outcome.size = measureSize(outcome.assembly, SizeMetric::InstructionCount,
                               profile.asm_comment_leader);
  }
  return outcome;
}

DriverProgram synthesizeDriver(const SourceProgram& program, const LanguageProfile& profile) {
  if (!symbolDefined(program.code, profile.function_symbol)) {
    throw Error(Errc::SignatureCorrupted,
                "mutant no longer defines '" + profile.function_symbol + "'");
  }

  // Drop lines the driver cannot coexist with, remembering the shift each
  // removal introduces for coverage line mapping.
  std::vector<std::string> kept;
  std::vector<int> line_map;
  {
    std::istringstream in(program.code);
    std::string line;
    while (std::getline(in, line)) {
      bool strip = std::find_if(profile.driver_strip.begin(), profile.driver_strip.end(),
                                [&](const std::string& s) { return trim(line) == trim(s); }) !=
                   profile.driver_strip.end();
      if (strip) {
        line_map.push_back(0);
      } else {
        kept.push_back(line);
        line_map.push_back(static_cast<int>(kept.size()));
      }
    }
  }
  std::string stripped;
  for (std::size_t i = 0; i < kept.size(); ++i) {
    stripped += kept[i];
    if (i + 1 < kept.size()) stripped += '\n';
  }

  std::string calls;
  for (long long value : profile.driver_inputs) {
    calls += substitutePlaceholders(
        profile.call_template,
        {{"fn", profile.function_symbol}, {"value", std::to_string(value)}});
  }

  std::string source = substitutePlaceholders(profile.driver_template,
                                              {{"code", stripped}, {"calls", calls}});

  std::size_t placeholder = profile.driver_template.find("{code}");
  int code_first_line = 1;
  if (placeholder != std::string::npos) {
    code_first_line += static_cast<int>(
        std::count(profile.driver_template.begin(),
                   profile.driver_template.begin() + placeholder, '\n'));
  }

  DriverProgram driver;
  driver.program = program;
  driver.program.code = source;
  driver.code_first_line = code_first_line;
  driver.line_map.resize(line_map.size());
  for (std::size_t i = 0; i < line_map.size(); ++i) {
    driver.line_map[i] = line_map[i] == 0 ? 0 : code_first_line + line_map[i] - 1;
  }
  return driver;
}

const char* toString(SanitizeVerdict verdict) {
  switch (verdict) {
    case SanitizeVerdict::Clean: return "clean";
    case SanitizeVerdict::Flagged: return "flagged";
    case SanitizeVerdict::Timeout: return "timeout";
    case SanitizeVerdict::Unavailable: return "unavailable";
    case SanitizeVerdict::BuildFailed: return "build_failed";
  }
  return "unknown";
}

SanitizeOutcome runSanitized(const DriverProgram& driver, const LanguageProfile& profile,
                             const ValidationTools& tools, const fs::path& scratch_dir) {
  if (tools.sanitizer_invocation.empty()) {
    return {SanitizeVerdict::Unavailable, "no sanitizer-capable toolchain configured"};
  }
  fs::create_directories(scratch_dir);
  fs::path input = scratch_dir / ("san" + profile.source_extension);
  fs::path binary = scratch_dir / "san.bin";
  writeFile(input, driver.program.code);

  std::string build_cmd = substitutePlaceholders(
      tools.sanitizer_invocation, {{"input", input.string()}, {"output", binary.string()}});
  RunResult build = runCommand(splitCommand(build_cmd), tools.compile_timeout);
  if (build.spawn_failed) {
    throw Error(Errc::ToolchainMissing, "cannot execute sanitizer build: " + build_cmd);
  }
  if (build.timed_out || build.exit_code != 0) {
    return {SanitizeVerdict::BuildFailed,
            build.timed_out ? "sanitizer build timed out" : truncateDiag(build.err)};
  }

  RunResult run = runCommand({binary.string()}, tools.run_timeout, scratch_dir.string());
  if (run.timed_out) {
    return {SanitizeVerdict::Timeout, "program did not terminate within " +
                                          std::to_string(tools.run_timeout) + "s"};
  }
  bool reported = run.err.find("runtime error") != std::string::npos ||
                  run.err.find("ERROR: AddressSanitizer") != std::string::npos ||
                  run.err.find("ERROR: LeakSanitizer") != std::string::npos ||
                  run.err.find("SUMMARY:") != std::string::npos;
  if (run.exit_code != 0 || reported) {
    return {SanitizeVerdict::Flagged, truncateDiag(run.err)};
  }
  return {SanitizeVerdict::Clean, ""};
}

std::map<int, long long> parseGcovCounts(const std::string& gcov_text) {
  std::map<int, long long> counts;
  std::istringstream in(gcov_text);
  std::string line;
  while (std::getline(in, line)) {
    std::size_t first_colon = line.find(':');
    if (first_colon == std::string::npos) continue;
    std::size_t second_colon = line.find(':', first_colon + 1);
    if (second_colon == std::string::npos) continue;
    std::string count_field = trim(line.substr(0, first_colon));
    std::string line_field = trim(line.substr(first_colon + 1, second_colon - first_colon - 1));
    int line_no = 0;
    try {
      line_no = std::stoi(line_field);
    } catch (const std::exception&) {
      continue;
    }
    if (line_no <= 0) continue;
    if (count_field == "-") continue;  // non-executable
    long long count = 0;
    if (count_field.rfind("#####", 0) == 0 || count_field.rfind("=====", 0) == 0) {
      count = 0;
    } else {
      std::size_t digits = 0;
      while (digits < count_field.size() &&
             std::isdigit(static_cast<unsigned char>(count_field[digits]))) {
        ++digits;
      }
      if (digits == 0) continue;
      count = std::stoll(count_field.substr(0, digits));
    }
    counts[line_no] = count;
  }
  return counts;
}

CoverageReport lineCoverage(const DriverProgram& driver, const LanguageProfile& profile,
                            const ValidationTools& tools, const fs::path& scratch_dir) {
  CoverageReport report;
  if (tools.coverage_invocation.empty()) {
    report.status = CoverageStatus::ToolMissing;
    report.detail = "no coverage-capable toolchain configured";
    return report;
  }
  fs::create_directories(scratch_dir);

  // Relative paths keep the .gcno/.gcda notes inside the scratch directory,
  // and the binary shares the source stem so gcov finds them.
  std::string source_name = "cov" + profile.source_extension;
  writeFile(scratch_dir / source_name, driver.program.code);

  std::string build_cmd = substitutePlaceholders(
      tools.coverage_invocation, {{"input", source_name}, {"output", "cov"}});
  RunResult build = runCommand(splitCommand(build_cmd), tools.compile_timeout,
                               scratch_dir.string());
  if (build.spawn_failed) {
    throw Error(Errc::ToolchainMissing, "cannot execute coverage build: " + build_cmd);
  }
  if (build.timed_out || build.exit_code != 0) {
    report.status = CoverageStatus::BuildFailed;
    report.detail = build.timed_out ? "coverage build timed out" : truncateDiag(build.err);
    return report;
  }

  RunResult run = runCommand({"./cov"}, tools.run_timeout, scratch_dir.string());
  report.status = CoverageStatus::Ok;
  report.exit_status = run.exit_code;
  if (run.timed_out) {
    report.terminated = false;
    return report;
  }
  report.terminated = true;

  std::string report_cmd =
      substitutePlaceholders(tools.coverage_report_command, {{"input", source_name}});
  RunResult gcov = runCommand(splitCommand(report_cmd), tools.compile_timeout,
                              scratch_dir.string());
  if (gcov.spawn_failed) {
    throw Error(Errc::ToolchainMissing, "cannot execute coverage report: " + report_cmd);
  }
  std::string gcov_text = readFile(scratch_dir / (source_name + ".gcov"));
  if (gcov.exit_code != 0 || gcov_text.empty()) {
    report.status = CoverageStatus::BuildFailed;
    report.detail = "coverage report unavailable: " + truncateDiag(gcov.err);
    return report;
  }
  report.line_counts = parseGcovCounts(gcov_text);
  return report;
}

void preflightToolchain(const std::vector<std::pair<CompilerSpec, std::string>>& compile_set,
                        const LanguageProfile& profile, const fs::path& scratch_dir,
                        double timeout_seconds, const MetricConfig& metric) {
  SourceProgram seed;
  seed.language = profile.id;
  seed.code = profile.seed_code;

  int index = 0;
  for (const auto& [compiler, flag] : compile_set) {
    std::string argv0;
    {
      auto tokens = splitCommand(substitutePlaceholders(
          metric.metric == SizeMetric::TextSectionBytes ? compiler.object_invocation
                                                        : compiler.invocation,
          {{"input", "x"}, {"output", "y"}, {"flags", flag}}));
      if (!tokens.empty()) argv0 = tokens.front();
    }
    if (!binaryExists(argv0)) {
      throw Error(Errc::ToolchainMissing,
                  "compiler '" + compiler.id + "' binary '" + argv0 + "' not found");
    }

    fs::path dir = scratch_dir / ("preflight-" + std::to_string(index++));
    CompileOutcome first = compileToAsm(compiler, flag, seed, profile, dir, timeout_seconds,
                                        metric);
    if (!first.success) {
      throw Error(Errc::ConfigError, "seed does not compile with '" + compiler.id + "' at " +
                                         flag + ": " + first.diagnostics);
    }
    // Reproducibility check: a size that drifts across identical invocations
    // is an environment defect, not a compiler violation.
    CompileOutcome second = compileToAsm(compiler, flag, seed, profile, dir, timeout_seconds,
                                         metric);
    if (!second.success || !first.size || !second.size ||
        first.size->value != second.size->value) {
      throw Error(Errc::ConfigError,
                  "compiler '" + compiler.id + "' at " + flag +
                      " is not reproducible: repeated compiles of the seed measured " +
                      std::to_string(first.size ? first.size->value : -1) + " then " +
                      std::to_string(second.size ? second.size->value : -1));
    }
  }
}

}  // namespace sizeprobe
