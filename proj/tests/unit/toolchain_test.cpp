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

#include <atomic>
#include <filesystem>
#include <fstream>

#include "doctest.h"
#include "sizeprobe/catalog.hpp"
#include "sizeprobe/mutation.hpp"
#include "sizeprobe/profile.hpp"
#include "sizeprobe/subprocess.hpp"

using namespace sizeprobe;
namespace fs = std::filesystem;

namespace {

fs::path freshScratch(const std::string& tag) {
  static std::atomic<int> counter{0};
  fs::path dir = fs::temp_directory_path() /
                 ("sizeprobe-toolchain-" + tag + "-" + std::to_string(counter.fetch_add(1)));
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

CompilerSpec gccSpec() {
  CompilerSpec spec;
  spec.id = "gcc-local";
  spec.invocation = "gcc {flags} -S {input} -o {output}";
  spec.version_label = "local";
  spec.size_opt_flag = "-Os";
  return spec;
}

CompilerSpec fakeSpec(const std::string& extra) {
  CompilerSpec spec;
  spec.id = "fake-cc";
  spec.invocation = "sh " SIZEPROBE_FIXTURE_DIR "/fake-cc.sh {flags} -S {input} -o {output}";
  spec.size_opt_flag = "-Oz";
  spec.other_flags = extra;
  return spec;
}

ValidationTools gccTools() {
  ValidationTools tools;
  tools.sanitizer_invocation =
      "gcc -O1 -g -fsanitize=address,undefined -fno-sanitize-recover=all {input} -o {output}";
  tools.coverage_invocation = "gcc --coverage -O0 {input} -o {output}";
  tools.run_timeout = 2.0;
  return tools;
}

}  // namespace

TEST_SUITE_BEGIN("toolchain");

TEST_CASE("instruction counting skips labels, directives and comments") {
  CHECK(measureInstructionCount("f:\n  mov w0, #0\n  ret\n", "#") == 2);
  CHECK(measureInstructionCount(".text\n.globl f\nf:\nret\n", "#") == 1);
  CHECK(measureInstructionCount("", "#") == 0);
  CHECK(measureInstructionCount("# whole line comment\n  add x0, x0, 1\n", "#") == 1);
  CHECK(measureInstructionCount("\t.cfi_startproc\n\tmovl $0, %eax\n\tret\n", "#") == 2);
}

TEST_CASE("instruction counting ignores surrounding whitespace and blank lines") {
  std::string bare = "f:\n  mov w0, 1\n  ret\n";
  std::string noisy = "\n\nf:   \n   mov w0, 1\t\n\n  ret  \n\n\n";
  CHECK(measureInstructionCount(bare, "#") == measureInstructionCount(noisy, "#"));
}

TEST_CASE("measureSize rejects the delegated metric") {
  CHECK_THROWS_AS(measureSize("ret\n", SizeMetric::TextSectionBytes, "#"), Error);
}

TEST_CASE("seed compiles with the local compiler and has positive size") {
  SourceProgram seed = seedFor("c");
  CompileOutcome outcome = compileToAsm(gccSpec(), "-Os", seed, profileFor("c"),
                                        freshScratch("seed"), 30.0);
  CHECK(outcome.success);
  REQUIRE(outcome.size.has_value());
  CHECK(outcome.size->value > 0);
  CHECK_FALSE(outcome.assembly.empty());
}

TEST_CASE("syntax errors surface as failed outcomes with diagnostics") {
  SourceProgram broken;
  broken.language = "c";
  broken.code = "int f(int a { this is not C";
  CompileOutcome outcome = compileToAsm(gccSpec(), "-Os", broken, profileFor("c"),
                                        freshScratch("broken"), 30.0);
  CHECK_FALSE(outcome.success);
  CHECK_FALSE(outcome.diagnostics.empty());
  CHECK(outcome.assembly.empty());
  CHECK_FALSE(outcome.size.has_value());
}

TEST_CASE("a compiler that outlives its timeout is reported as such") {
  SourceProgram seed = seedFor("c");
  CompileOutcome outcome = compileToAsm(fakeSpec("--sleep=10"), "-Oz", seed, profileFor("c"),
                                        freshScratch("slow"), 1.0);
  CHECK_FALSE(outcome.success);
  CHECK(outcome.diagnostics == "timeout");
  CHECK(outcome.wall_time <= 1.0 + 0.5);
}

TEST_CASE("a missing compiler binary is campaign-fatal") {
  CompilerSpec ghost;
  ghost.id = "ghost";
  ghost.invocation = "definitely-not-a-compiler-9000 {flags} -S {input} -o {output}";
  SourceProgram seed = seedFor("c");
  CHECK_THROWS_AS(
      compileToAsm(ghost, "-Os", seed, profileFor("c"), freshScratch("ghost"), 5.0), Error);
}

TEST_CASE("fake compiler sizes are driven by stub markers") {
  SourceProgram seed = seedFor("c");
  fs::path scratch = freshScratch("fake");
  CompileOutcome base = compileToAsm(fakeSpec(""), "-Oz", seed, profileFor("c"),
                                     scratch / "s0", 10.0);
  REQUIRE(base.success);
  CHECK(base.size->value == 5);  // --base default

  SourceProgram one_marker = seed;
  one_marker.code += "\n/* SP_MARK */";
  CompileOutcome grown = compileToAsm(fakeSpec(""), "-Oz", one_marker, profileFor("c"),
                                      scratch / "s1", 10.0);
  REQUIRE(grown.success);
  CHECK(grown.size->value == 9);  // base 5 + per-marker 4

  SourceProgram dead_marker = seed;
  dead_marker.code += "\n/* SP_MARK_DEAD */";
  CompileOutcome eliminated = compileToAsm(fakeSpec(""), "-Oz", dead_marker, profileFor("c"),
                                           scratch / "s2", 10.0);
  REQUIRE(eliminated.success);
  CHECK(eliminated.size->value == 5);  // dead markers are optimized away

  CompileOutcome kept = compileToAsm(fakeSpec("--keep-dead"), "-Oz", dead_marker,
                                     profileFor("c"), scratch / "s3", 10.0);
  REQUIRE(kept.success);
  CHECK(kept.size->value == 9);  // a dead-blind compiler keeps them
}

TEST_CASE("driver wraps the mutant and actually runs") {
  SourceProgram seed = seedFor("c");
  DriverProgram driver = synthesizeDriver(seed, profileFor("c"));
  CHECK(driver.program.code.find("int main(void)") != std::string::npos);
  CHECK(driver.program.code.find("f(-1)") != std::string::npos);
  CHECK(driver.program.code.find("f(10)") != std::string::npos);

  fs::path scratch = freshScratch("driver");
  std::ofstream(scratch / "driver.c") << driver.program.code;
  RunResult build = runCommand(
      splitCommand("gcc -O0 " + (scratch / "driver.c").string() + " -o " +
                   (scratch / "driver.bin").string()),
      30.0);
  REQUIRE(build.exit_code == 0);
  RunResult run = runCommand({(scratch / "driver.bin").string()}, 5.0);
  CHECK(run.exit_code == 0);
}

TEST_CASE("driver synthesis rejects a renamed function") {
  SourceProgram renamed;
  renamed.language = "c";
  renamed.code = "int g(int a) { return 0; }";
  try {
    synthesizeDriver(renamed, profileFor("c"));
    FAIL("expected SignatureCorrupted");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::SignatureCorrupted);
  }
}

TEST_CASE("rust driver strips the no-entry-point attribute and maps lines") {
  SourceProgram seed = seedFor("rust");
  DriverProgram driver = synthesizeDriver(seed, profileFor("rust"));
  CHECK(driver.program.code.find("#![no_main]") == std::string::npos);
  CHECK(driver.program.code.find("fn main()") != std::string::npos);
  REQUIRE(driver.line_map.size() == 3);
  CHECK(driver.line_map[0] == 0);  // stripped
  CHECK(driver.line_map[1] == driver.code_first_line);
  CHECK(driver.line_map[2] == driver.code_first_line + 1);
}

TEST_CASE("sanitizer run is clean for the seed") {
  DriverProgram driver = synthesizeDriver(seedFor("c"), profileFor("c"));
  SanitizeOutcome outcome =
      runSanitized(driver, profileFor("c"), gccTools(), freshScratch("san-clean"));
  CHECK((outcome.verdict == SanitizeVerdict::Clean));
}

TEST_CASE("sanitizer flags an out-of-bounds access") {
  SourceProgram bad;
  bad.language = "c";
  bad.code =
      "int f(int a) {\n"
      "  int arr[4] = {1, 2, 3, 4};\n"
      "  return arr[a + 5];\n"
      "}";
  DriverProgram driver = synthesizeDriver(bad, profileFor("c"));
  SanitizeOutcome outcome =
      runSanitized(driver, profileFor("c"), gccTools(), freshScratch("san-oob"));
  CHECK((outcome.verdict == SanitizeVerdict::Flagged));
  CHECK_FALSE(outcome.report.empty());
}

TEST_CASE("sanitizer reports non-termination as timeout") {
  SourceProgram spin;
  spin.language = "c";
  spin.code =
      "int f(int a) {\n"
      "  for (;;) {\n"
      "    a += 1;\n"
      "    a -= 1;\n"
      "  }\n"
      "}";
  DriverProgram driver = synthesizeDriver(spin, profileFor("c"));
  SanitizeOutcome outcome =
      runSanitized(driver, profileFor("c"), gccTools(), freshScratch("san-spin"));
  CHECK((outcome.verdict == SanitizeVerdict::Timeout));
}

TEST_CASE("sanitizer is skipped when unconfigured") {
  DriverProgram driver = synthesizeDriver(seedFor("c"), profileFor("c"));
  ValidationTools none;
  SanitizeOutcome outcome =
      runSanitized(driver, profileFor("c"), none, freshScratch("san-none"));
  CHECK((outcome.verdict == SanitizeVerdict::Unavailable));
}

TEST_CASE("coverage counts equal the driver call count") {
  DriverProgram driver = synthesizeDriver(seedFor("c"), profileFor("c"));
  CoverageReport report =
      lineCoverage(driver, profileFor("c"), gccTools(), freshScratch("cov-seed"));
  REQUIRE((report.status == CoverageStatus::Ok));
  CHECK(report.terminated);
  // The seed is a single line; it runs once per driver input.
  auto it = report.line_counts.find(driver.code_first_line);
  REQUIRE(it != report.line_counts.end());
  CHECK(it->second == 4);
}

TEST_CASE("statically dead lines have no executions") {
  SourceProgram dead;
  dead.language = "c";
  dead.code =
      "int f(int a) {\n"
      "  if (0)\n"
      "  {\n"
      "    a += 1;\n"
      "  }\n"
      "  return 0;\n"
      "}";
  DriverProgram driver = synthesizeDriver(dead, profileFor("c"));
  CoverageReport report =
      lineCoverage(driver, profileFor("c"), gccTools(), freshScratch("cov-dead"));
  REQUIRE((report.status == CoverageStatus::Ok));
  CHECK(report.terminated);
  int body_line = driver.code_first_line + 3;  // "a += 1;"
  auto it = report.line_counts.find(body_line);
  long long count = it == report.line_counts.end() ? 0 : it->second;
  CHECK(count == 0);
  // The returning line executed.
  auto ret = report.line_counts.find(driver.code_first_line + 5);
  REQUIRE(ret != report.line_counts.end());
  CHECK(ret->second == 4);
}

TEST_CASE("coverage reports non-termination") {
  SourceProgram spin;
  spin.language = "c";
  spin.code = "int f(int a) {\n  for (;;) {\n    a += 1;\n    a -= 1;\n  }\n}";
  DriverProgram driver = synthesizeDriver(spin, profileFor("c"));
  CoverageReport report =
      lineCoverage(driver, profileFor("c"), gccTools(), freshScratch("cov-spin"));
  REQUIRE((report.status == CoverageStatus::Ok));
  CHECK_FALSE(report.terminated);
  CHECK(report.line_counts.empty());
}

TEST_CASE("gcov text parsing") {
  std::string text =
      "        -:    0:Source:cov.c\n"
      "        4:    1:int f(int a) {\n"
      "        -:    2:  {\n"
      "    #####:    3:      a += 7;\n"
      "        2:    4:  for (i...\n"
      "       12*:    5:  something partial\n";
  auto counts = parseGcovCounts(text);
  CHECK(counts.size() == 4);
  CHECK(counts.at(1) == 4);
  CHECK(counts.at(3) == 0);
  CHECK(counts.at(4) == 2);
  CHECK(counts.at(5) == 12);
  CHECK(counts.find(2) == counts.end());
}

TEST_CASE("all fifteen stub rules applied in sequence still compile") {
  // The stub's whole point is deterministic offline CI, so its accumulated
  // output must remain genuine C/C++.
  StubProvider stub;
  for (const auto& [language, compile_template] :
       std::vector<std::pair<std::string, std::string>>{
           {"c", "gcc -std=c11 -Wall {flags} -S {input} -o {output}"},
           {"cpp", "g++ -std=c++17 -Wall {flags} -S {input} -o {output}"}}) {
    std::string code = seedFor(language).code;
    for (const auto& instruction : defaultCatalog()) {
      PromptRequest request = buildPrompt(profileFor(language), instruction, code);
      code = stub.mutate(request);
    }
    CompilerSpec spec;
    spec.id = "real-" + language;
    spec.invocation = compile_template;
    SourceProgram accumulated;
    accumulated.language = language;
    accumulated.code = code;
    accumulated.step_index = 15;
    CompileOutcome outcome = compileToAsm(spec, "-Os", accumulated, profileFor(language),
                                          freshScratch("stub-" + language), 30.0);
    CHECK_MESSAGE(outcome.success, outcome.diagnostics);
    // And the driver still wraps it: the f signature survived every rule.
    DriverProgram driver = synthesizeDriver(accumulated, profileFor(language));
    CHECK(driver.program.code.find("sizeprobe_sink") != std::string::npos);
  }
}

TEST_CASE("placeholder substitution leaves code braces and unknown keys alone") {
  std::map<std::string, std::string> values = {{"input", "a.c"}, {"output", "a.s"}};
  CHECK(substitutePlaceholders("cc {flags} {input} -o {output}", values) ==
        "cc {flags} a.c -o a.s");
  CHECK(substitutePlaceholders("int main(void) {\n{input}\n}\n", values) ==
        "int main(void) {\na.c\n}\n");
  CHECK(substitutePlaceholders("unbalanced { brace", values) == "unbalanced { brace");
  CHECK(splitCommand("  cc   -O2  x.c ") == std::vector<std::string>{"cc", "-O2", "x.c"});
}

TEST_CASE("text-section metric delegates to the external size tool") {
  CompilerSpec spec = fakeSpec("");
  spec.object_invocation =
      "sh " SIZEPROBE_FIXTURE_DIR "/fake-cc.sh {flags} -S {input} -o {output}";
  MetricConfig metric;
  metric.metric = SizeMetric::TextSectionBytes;
  metric.size_tool_command = "sh " SIZEPROBE_FIXTURE_DIR "/fake-size.sh {input}";

  SourceProgram seed = seedFor("c");
  CompileOutcome outcome = compileToAsm(spec, "-Oz", seed, profileFor("c"),
                                        freshScratch("bytes"), 10.0, metric);
  REQUIRE(outcome.success);
  REQUIRE(outcome.size.has_value());
  CHECK((outcome.size->metric == SizeMetric::TextSectionBytes));
  CHECK(outcome.size->value > 0);
  CHECK(outcome.assembly.empty());

  MetricConfig missing_tool;
  missing_tool.metric = SizeMetric::TextSectionBytes;
  CHECK_THROWS_AS(compileToAsm(spec, "-Oz", seed, profileFor("c"),
                               freshScratch("bytes-bad"), 10.0, missing_tool),
                  Error);
}

TEST_CASE("preflight accepts the local toolchain and rejects ghosts") {
  std::vector<std::pair<CompilerSpec, std::string>> good = {{gccSpec(), "-Os"}};
  CHECK_NOTHROW(preflightToolchain(good, profileFor("c"), freshScratch("preflight"), 30.0));

  CompilerSpec ghost;
  ghost.id = "ghost";
  ghost.invocation = "definitely-not-a-compiler-9000 {flags} -S {input} -o {output}";
  std::vector<std::pair<CompilerSpec, std::string>> bad = {{ghost, "-Os"}};
  try {
    preflightToolchain(bad, profileFor("c"), freshScratch("preflight-bad"), 5.0);
    FAIL("expected ToolchainMissing");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::ToolchainMissing);
  }
}

TEST_SUITE_END();
