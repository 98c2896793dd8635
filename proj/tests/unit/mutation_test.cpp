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

#include "sizeprobe/mutation.hpp"

#include <map>
#include <set>
#include <thread>

#include "doctest.h"
#include "httplib.h"
#include "json.hpp"
#include "sizeprobe/catalog.hpp"
#include "sizeprobe/profile.hpp"

using namespace sizeprobe;

TEST_SUITE_BEGIN("mutation");

TEST_CASE("seeds match the per-language profiles") {
  CHECK(seedFor("c").code == "int f(int a) { return 0; }");
  CHECK(seedFor("c").step_index == 0);
  CHECK(seedFor("swift").code == "func f(a: Int) -> Int { return a }");
  SourceProgram rust = seedFor("rust");
  CHECK(rust.code.find("pub fn f(a: i32) -> i32 { 0 }") != std::string::npos);
  CHECK(rust.code.find("#![no_main]") != std::string::npos);
  CHECK_THROWS_AS(seedFor("fortran"), Error);
}

TEST_CASE("uniform sampling over the full catalog") {
  auto catalog = defaultCatalog();
  const LanguageProfile& profile = profileFor("c");
  // Code with an existing conditional so the Conditionals category is
  // eligible and all 15 instructions are in play.
  std::string code = "int f(int a) { if (a == 10) { a += 1; } return 0; }";
  Rng rng(1234);

  std::map<std::string, int> draws;
  const int kDraws = 10000;
  for (int i = 0; i < kDraws; ++i) {
    draws[sampleInstruction(Strategy::MultiCompiler, rng, catalog, code, profile).id]++;
  }
  CHECK(draws.size() == 15);

  // Chi-square against uniform; df = 14, 99th percentile = 29.141.
  double expected = static_cast<double>(kDraws) / 15.0;
  double chi2 = 0.0;
  for (const auto& [id, observed] : draws) {
    double delta = static_cast<double>(observed) - expected;
    chi2 += delta * delta / expected;
  }
  CHECK(chi2 < 29.141);
}

TEST_CASE("dead-code strategy samples only dead instructions") {
  auto catalog = defaultCatalog();
  const LanguageProfile& profile = profileFor("c");
  std::string code = "int f(int a) { if (a == 10) { a += 1; } return 0; }";
  Rng rng(99);
  for (int i = 0; i < 500; ++i) {
    const MutationInstruction& instruction =
        sampleInstruction(Strategy::DeadCode, rng, catalog, code, profile);
    CHECK((instruction.deadness == Deadness::Dead));
    CHECK(instruction.text.find("dead") != std::string::npos);
  }
}

TEST_CASE("dead-code sampling on the bare seed draws the four dead inserts") {
  // No control flow exists yet, so the dead-condition mutation is gated out.
  auto catalog = defaultCatalog();
  const LanguageProfile& profile = profileFor("c");
  Rng rng(17);
  std::set<std::string> seen;
  for (int i = 0; i < 400; ++i) {
    seen.insert(
        sampleInstruction(Strategy::DeadCode, rng, catalog, profile.seed_code, profile).id);
  }
  CHECK(seen == std::set<std::string>{"dead-if-stmt", "dead-nested-if-stmt", "dead-loop",
                                      "dead-nested-loop"});
}

TEST_CASE("conditionals instructions wait for control flow to exist") {
  auto catalog = defaultCatalog();
  const LanguageProfile& profile = profileFor("c");
  Rng rng(5);
  // The seed has no loop or conditional, so both complicate-* entries are
  // ineligible.
  for (int i = 0; i < 300; ++i) {
    const MutationInstruction& instruction = sampleInstruction(
        Strategy::MultiCompiler, rng, catalog, profileFor("c").seed_code, profile);
    CHECK((instruction.category != InstructionCategory::Conditionals));
  }
  // An identifier containing "if" does not count as control flow.
  std::string tricky = "int f(int gift) { return gift; }";
  CHECK_FALSE(codeHasControlFlow(tricky, profile));
  CHECK(codeHasControlFlow("int f(int a) { while (a) {} return 0; }", profile));
}

TEST_CASE("sampling an empty eligible set fails") {
  const LanguageProfile& profile = profileFor("c");
  Rng rng(1);
  std::vector<MutationInstruction> empty;
  CHECK_THROWS_AS(
      sampleInstruction(Strategy::MultiCompiler, rng, empty, profile.seed_code, profile),
      Error);
  // A catalog with no dead entries starves the dead-code strategy.
  std::vector<MutationInstruction> live_only;
  for (const auto& instruction : defaultCatalog()) {
    if (instruction.deadness == Deadness::Live) live_only.push_back(instruction);
  }
  CHECK_THROWS_AS(
      sampleInstruction(Strategy::DeadCode, rng, live_only, profile.seed_code, profile),
      Error);
}

TEST_CASE("sampling is reproducible for a fixed seed") {
  auto catalog = defaultCatalog();
  const LanguageProfile& profile = profileFor("c");
  std::string code = "int f(int a) { if (a == 10) { a += 1; } return 0; }";
  std::vector<std::string> first;
  std::vector<std::string> second;
  {
    Rng rng(777);
    for (int i = 0; i < 50; ++i) {
      first.push_back(sampleInstruction(Strategy::MultiCompiler, rng, catalog, code, profile).id);
    }
  }
  {
    Rng rng(777);
    for (int i = 0; i < 50; ++i) {
      second.push_back(
          sampleInstruction(Strategy::MultiCompiler, rng, catalog, code, profile).id);
    }
  }
  CHECK(first == second);
}

TEST_CASE("prompt rendering follows the fixed template") {
  const LanguageProfile& c = profileFor("c");
  MutationInstruction array_code;
  array_code.id = "array-code";
  array_code.text = "add array code";
  PromptRequest request = buildPrompt(c, array_code, c.seed_code);
  CHECK(request.rendered_prompt ==
        "Given the following C program, please add array code:\n\n"
        "int f(int a) { return 0; }");

  // The code substring appears byte-identical.
  std::string code = "int f(int a) {\n  if (a == 10) { a += 1; }\n  return 0;\n}";
  MutationInstruction complicate;
  complicate.id = "complicate-condition";
  complicate.text = "make a condition more complicated";
  PromptRequest request2 = buildPrompt(c, complicate, code);
  CHECK(request2.rendered_prompt.find(code) != std::string::npos);
  CHECK(request2.rendered_prompt.rfind("Given the following C program, please make a "
                                       "condition more complicated:\n\n",
                                       0) == 0);
}

TEST_CASE("prompt uses the per-language instruction variant") {
  const LanguageProfile& swift = profileFor("swift");
  auto catalog = defaultCatalog();
  const MutationInstruction* union_code = nullptr;
  for (const auto& instruction : catalog) {
    if (instruction.id == "union-code") union_code = &instruction;
  }
  REQUIRE(union_code != nullptr);
  PromptRequest request = buildPrompt(swift, *union_code, swift.seed_code);
  CHECK(request.rendered_prompt.find("add enumeration code usage") != std::string::npos);
  CHECK(request.rendered_prompt.find("add union code usage") == std::string::npos);
  CHECK(request.rendered_prompt.rfind("Given the following Swift program", 0) == 0);
}

TEST_CASE("extraction takes the first fenced block") {
  const LanguageProfile& c = profileFor("c");
  CHECK(extractCode("Here is the program:\n```c\nint f(int a){return 0;}\n```", c) ==
        "int f(int a){return 0;}");
  CHECK(extractCode("```\nint f(int a){return 1;}\n```\nAnd also:\n```\nint g(void){return 2;}\n```",
                    c) == "int f(int a){return 1;}");
}

TEST_CASE("extraction trims prose around unfenced code") {
  const LanguageProfile& c = profileFor("c");
  std::string response =
      "Sure, here is the mutated program.\n"
      "int f(int a) {\n  return 0;\n}\n"
      "Let me know if you need more changes.";
  CHECK(extractCode(response, c) == "int f(int a) {\n  return 0;\n}");
}

TEST_CASE("extraction fails when no code is recognizable") {
  const LanguageProfile& c = profileFor("c");
  CHECK_THROWS_AS(extractCode("Sure! I added the loop.", c), Error);
  CHECK_THROWS_AS(extractCode("```\n\n```", c), Error);
  try {
    extractCode("Sure! I added the loop.", c);
  } catch (const Error& e) {
    CHECK(e.code() == Errc::ExtractionFailed);
  }
}

TEST_CASE("extraction is idempotent once it succeeds") {
  const LanguageProfile& c = profileFor("c");
  std::vector<std::string> responses = {
      "Here you go:\n```c\nint f(int a) {\n  return 0;\n}\n```\nEnjoy!",
      "int f(int a) {\n  if (a == 10) { a += 1; }\n  return 0;\n}",
      "Prose first.\nint f(int a) { return 0; }",
  };
  for (const auto& response : responses) {
    std::string once = extractCode(response, c);
    CHECK(extractCode(once, c) == once);
  }
}

TEST_CASE("stub applies the documented dead-conditional shape") {
  StubProvider stub;
  MutationInstruction dead_if;
  dead_if.id = "dead-if-stmt";
  dead_if.text = "add a dead conditional statement with a statement inside";
  PromptRequest request = buildPrompt(profileFor("c"), dead_if, seedFor("c").code);
  std::string mutated = stub.mutate(request);
  CHECK(mutated.find("if (0)") != std::string::npos);
  CHECK(StubProvider::countMarkers(mutated) == 1);
  // Still defines f and keeps the original return reachable.
  CHECK(mutated.find("int f(int a)") != std::string::npos);
  CHECK(mutated.find("return 0;") != std::string::npos);
}

TEST_CASE("stub complicates equality conditions the documented way") {
  StubProvider stub;
  MutationInstruction complicate;
  complicate.id = "complicate-condition";
  complicate.text = "make a condition more complicated";
  std::string code = "int f(int x) { if (x == 10) { x += 1; } return 0; }";
  PromptRequest request = buildPrompt(profileFor("c"), complicate, code);
  std::string mutated = stub.mutate(request);
  CHECK(mutated.find("if (x >= 10 && x <= 10)") != std::string::npos);
  CHECK(mutated.find("x == 10") == std::string::npos);
}

TEST_CASE("every stub rule adds exactly one marker and stays applicable") {
  StubProvider stub;
  for (const char* language : {"c", "cpp", "rust", "swift"}) {
    std::string code = seedFor(language).code;
    int step = 0;
    for (const auto& instruction : defaultCatalog()) {
      PromptRequest request = buildPrompt(profileFor(language), instruction, code);
      std::string mutated = stub.mutate(request);
      ++step;
      CHECK(StubProvider::countMarkers(mutated) == step);
      code = mutated;
    }
  }
}

TEST_CASE("fences without a closing marker extend to the end of the response") {
  const LanguageProfile& c = profileFor("c");
  CHECK(extractCode("Here:\n```c\nint f(int a) {\n  return 0;\n}", c) ==
        "int f(int a) {\n  return 0;\n}");
}

TEST_CASE("stub break option produces unparseable code at the chosen step") {
  StubProvider::Options options;
  options.break_at_step = 3;
  StubProvider stub(options);
  std::string code = seedFor("c").code;
  auto catalog = defaultCatalog();
  for (int step = 1; step <= 3; ++step) {
    PromptRequest request = buildPrompt(profileFor("c"), catalog[0], code);
    code = stub.mutate(request);
  }
  CHECK(code.find("SP_SYNTAX_ERROR") != std::string::npos);
}

TEST_CASE("remote provider speaks the chat-completion wire format") {
  httplib::Server server;
  std::string seen_body;
  server.Post("/v1/chat/completions", [&](const httplib::Request& req, httplib::Response& res) {
    seen_body = req.body;
    nlohmann::json reply;
    reply["choices"] = nlohmann::json::array(
        {nlohmann::json{{"message", {{"role", "assistant"},
                                     {"content", "```c\nint f(int a){return 0;}\n```"}}}}});
    res.set_content(reply.dump(), "application/json");
  });
  int port = server.bind_to_any_port("127.0.0.1");
  REQUIRE(port > 0);
  std::thread server_thread([&] { server.listen_after_bind(); });
  server.wait_until_ready();

  RemoteProvider::Options options;
  options.endpoint = "http://127.0.0.1:" + std::to_string(port) + "/v1/chat/completions";
  options.model = "test-model";
  options.request_timeout = 5.0;
  options.params["temperature"] = "0.8";
  RemoteProvider provider(options);

  MutationInstruction instruction;
  instruction.id = "array-code";
  instruction.text = "add array code";
  PromptRequest request = buildPrompt(profileFor("c"), instruction, seedFor("c").code);
  std::string raw = provider.mutate(request);
  CHECK(raw.find("int f(int a){return 0;}") != std::string::npos);

  nlohmann::json body = nlohmann::json::parse(seen_body);
  CHECK(body.at("model") == "test-model");
  CHECK(body.at("messages").at(0).at("role") == "user");
  CHECK(body.at("messages").at(0).at("content").get<std::string>() == request.rendered_prompt);
  CHECK(body.at("temperature").get<double>() == doctest::Approx(0.8));

  server.stop();
  server_thread.join();
}

TEST_CASE("remote provider parses the common response shapes") {
  CHECK(RemoteProvider::parseResponseContent(
            R"({"choices":[{"message":{"content":"code"}}]})") == "code");
  CHECK(RemoteProvider::parseResponseContent(R"({"message":{"content":"code"}})") == "code");
  CHECK(RemoteProvider::parseResponseContent(R"({"content":"code"})") == "code");
  CHECK(RemoteProvider::parseResponseContent(R"({"response":"code"})") == "code");
  CHECK(RemoteProvider::parseResponseContent("not json").empty());
}

TEST_CASE("a response slower than the request timeout aborts as ProviderTimeout") {
  httplib::Server server;
  server.Post("/slow", [](const httplib::Request&, httplib::Response& res) {
    std::this_thread::sleep_for(std::chrono::milliseconds(1500));
    res.set_content(R"({"content":"late"})", "application/json");
  });
  int port = server.bind_to_any_port("127.0.0.1");
  REQUIRE(port > 0);
  std::thread server_thread([&] { server.listen_after_bind(); });
  server.wait_until_ready();

  RemoteProvider::Options options;
  options.endpoint = "http://127.0.0.1:" + std::to_string(port) + "/slow";
  options.model = "test-model";
  options.request_timeout = 0.5;
  RemoteProvider provider(options);

  MutationInstruction instruction;
  instruction.id = "array-code";
  instruction.text = "add array code";
  PromptRequest request = buildPrompt(profileFor("c"), instruction, seedFor("c").code);
  try {
    provider.mutate(request);
    FAIL("expected ProviderTimeout");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::ProviderTimeout);
  }
  server.stop();
  server_thread.join();
}

TEST_CASE("unreachable endpoint fails as unavailable after retries") {
  RemoteProvider::Options options;
  options.endpoint = "http://127.0.0.1:9";  // discard port; nothing listens
  options.model = "test-model";
  options.request_timeout = 2.0;
  options.max_retries = 3;
  options.backoff_initial = 0.01;
  RemoteProvider provider(options);

  MutationInstruction instruction;
  instruction.id = "array-code";
  instruction.text = "add array code";
  PromptRequest request = buildPrompt(profileFor("c"), instruction, seedFor("c").code);
  try {
    provider.mutate(request);
    FAIL("expected ProviderUnavailable");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::ProviderUnavailable);
  }
}

TEST_SUITE_END();
