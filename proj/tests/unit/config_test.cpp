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

#include "sizeprobe/config.hpp"

#include <atomic>
#include <filesystem>
#include <fstream>

#include "doctest.h"

using namespace sizeprobe;
namespace fs = std::filesystem;

namespace {

fs::path writeTempFile(const std::string& tag, const std::string& content) {
  static std::atomic<int> counter{0};
  fs::path path = fs::temp_directory_path() /
                  ("sizeprobe-config-" + tag + "-" + std::to_string(counter.fetch_add(1)) +
                   ".json");
  std::ofstream(path) << content;
  return path;
}

const char* kTwoCompilers = R"([
  {"id": "cc-a", "invocation": "true {flags} -S {input} -o {output}", "size_opt_flag": "-Oz"},
  {"id": "cc-b", "invocation": "true {flags} -S {input} -o {output}", "size_opt_flag": "-Os"}
])";

std::string configWithCompilers(const std::string& extra) {
  std::string compilers = kTwoCompilers;
  return "{\"compilers\": " + compilers + (extra.empty() ? "" : ", " + extra) + "}";
}

}  // namespace

TEST_SUITE_BEGIN("config");

TEST_CASE("defaults plus two compilers yields the documented thresholds") {
  fs::path path = writeTempFile("defaults", configWithCompilers(""));
  CampaignConfig config = loadConfig(path.string(), {}, {});
  CHECK(config.strategy.pipeline_threshold == Fraction{1, 20});
  CHECK(config.strategy.multi_compiler_threshold == Fraction{1, 10});
  CHECK(config.strategy.single_compiler_threshold == Fraction{0, 1});
  CHECK(config.max_steps == 10);
  CHECK((config.strategy.strategy == Strategy::MultiCompiler));
  CHECK(config.provider.kind == "stub");
  CHECK(config.jobs == 1);
  CHECK((config.metric.metric == SizeMetric::InstructionCount));
  CHECK(config.catalog.size() == 15);
  CHECK(config.profile.id == "c");
}

TEST_CASE("multi-compiler strategy insists on two compilers") {
  fs::path path = writeTempFile("one", R"({
    "strategy": "multi_compiler",
    "compilers": [{"id": "only", "invocation": "true {flags} -S {input} -o {output}"}]
  })");
  try {
    loadConfig(path.string(), {}, {});
    FAIL("expected ConfigError");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::ConfigError);
    CHECK(std::string(e.what()).find("compilers") != std::string::npos);
  }
}

TEST_CASE("single-compiler strategy needs a trunk entry last") {
  fs::path path = writeTempFile("notrunk", configWithCompilers(R"("strategy": "single_compiler")"));
  CHECK_THROWS_AS(loadConfig(path.string(), {}, {}), Error);

  fs::path trunk_path = writeTempFile("trunk", R"({
    "strategy": "single_compiler",
    "compilers": [
      {"id": "cc-13", "invocation": "true {flags} -S {input} -o {output}"},
      {"id": "cc-trunk", "invocation": "true {flags} -S {input} -o {output}", "channel": "trunk"}
    ]
  })");
  CHECK_NOTHROW(loadConfig(trunk_path.string(), {}, {}));
}

TEST_CASE("environment overrides the file and flags override the environment") {
  fs::path path = writeTempFile("prec", configWithCompilers(R"(
    "provider": {"kind": "remote", "endpoint": "http://file:1/x", "model": "file-model"}
  )"));

  std::map<std::string, std::string> env = {
      {"SIZEPROBE_LLM_ENDPOINT", "http://env:2/y"},
  };
  CampaignConfig from_env = loadConfig(path.string(), env, {});
  CHECK(from_env.provider.endpoint == "http://env:2/y");
  CHECK(from_env.provider.model == "file-model");

  ConfigOverrides overrides;
  overrides.endpoint = "http://flag:3/z";
  CampaignConfig from_flags = loadConfig(path.string(), env, overrides);
  CHECK(from_flags.provider.endpoint == "http://flag:3/z");
}

TEST_CASE("remote provider requires endpoint and model") {
  fs::path path = writeTempFile("remote", configWithCompilers(R"(
    "provider": {"kind": "remote"}
  )"));
  CHECK_THROWS_AS(loadConfig(path.string(), {}, {}), Error);
}

TEST_CASE("validation bounds") {
  CHECK_THROWS_AS(
      loadConfig(writeTempFile("thr", configWithCompilers(R"("pipeline_threshold": 1.5)")).string(),
                 {}, {}),
      Error);
  CHECK_THROWS_AS(
      loadConfig(writeTempFile("steps", configWithCompilers(R"("max_steps": 0)")).string(), {},
                 {}),
      Error);
  CHECK_THROWS_AS(
      loadConfig(writeTempFile("jobs", configWithCompilers(R"("jobs": 0)")).string(), {}, {}),
      Error);
  CHECK_THROWS_AS(
      loadConfig(writeTempFile("lang", configWithCompilers(R"("language": "cobol")")).string(),
                 {}, {}),
      Error);
}

TEST_CASE("dead-code strategy without coverage tooling is a config error") {
  fs::path path = writeTempFile("dead", configWithCompilers(R"("strategy": "dead_code")"));
  try {
    loadConfig(path.string(), {}, {});
    FAIL("expected ConfigError");
  } catch (const Error& e) {
    CHECK(std::string(e.what()).find("coverage") != std::string::npos);
  }

  fs::path ok_path = writeTempFile("dead-ok", configWithCompilers(R"(
    "strategy": "dead_code",
    "coverage_invocation": "gcc --coverage -O0 {input} -o {output}"
  )"));
  CHECK_NOTHROW(loadConfig(ok_path.string(), {}, {}));

  fs::path relaxed_path = writeTempFile("dead-relaxed", configWithCompilers(R"(
    "strategy": "dead_code",
    "require_dead_code_filter": false
  )"));
  CHECK_NOTHROW(loadConfig(relaxed_path.string(), {}, {}));
}

TEST_CASE("text-section metric needs the size tool and object invocations") {
  fs::path path = writeTempFile("metric", configWithCompilers(R"("metric": "text_section_bytes")"));
  CHECK_THROWS_AS(loadConfig(path.string(), {}, {}), Error);
}

TEST_CASE("compiler matrix files parse into specs") {
  fs::path path = writeTempFile("matrix", kTwoCompilers);
  std::vector<CompilerSpec> specs = loadCompilersFile(path.string());
  REQUIRE(specs.size() == 2);
  CHECK(specs[0].id == "cc-a");
  CHECK(specs[0].size_opt_flag == "-Oz");
  CHECK((specs[0].channel == Channel::Release));
  CHECK(specs[1].perf_opt_flag == "-O3");

  CHECK_THROWS_AS(parseCompilers("{}"), Error);
  CHECK_THROWS_AS(parseCompilers("[{\"invocation\": \"cc\"}]"), Error);
}

TEST_CASE("invocation templates must carry both placeholders") {
  fs::path path = writeTempFile("tmpl", R"({
    "compilers": [
      {"id": "cc-a", "invocation": "true {input}"},
      {"id": "cc-b", "invocation": "true {input} {output}"}
    ]
  })");
  try {
    loadConfig(path.string(), {}, {});
    FAIL("expected ConfigError");
  } catch (const Error& e) {
    CHECK(std::string(e.what()).find("{output}") != std::string::npos);
  }
}

TEST_CASE("driver inputs can be overridden from the config file") {
  fs::path path = writeTempFile("inputs", configWithCompilers(R"("driver_inputs": [0, 7])"));
  CampaignConfig config = loadConfig(path.string(), {}, {});
  CHECK(config.profile.driver_inputs == std::vector<long long>{0, 7});
}

TEST_SUITE_END();
