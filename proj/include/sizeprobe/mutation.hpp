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

#ifndef SIZEPROBE_MUTATION_HPP_
#define SIZEPROBE_MUTATION_HPP_

#include <map>
#include <memory>
#include <string>
#include <vector>

#include "sizeprobe/core.hpp"
#include "sizeprobe/rng.hpp"

namespace sizeprobe {

struct PromptRequest {
  std::string language;  // language id
  MutationInstruction instruction;
  std::string code;
  std::string rendered_prompt;
};

// Step-0 program for a language: exactly the profile seed.
SourceProgram seedFor(const std::string& language_id);

// Uniform draw from the instructions eligible under the session strategy and
// the current code. The dead-code strategy restricts to dead instructions;
// Conditionals-category entries are eligible only once the code already
// contains a loop or conditional. Throws Error(NoEligibleInstruction) when
// the eligible set is empty.
const MutationInstruction& sampleInstruction(Strategy strategy, Rng& rng,
                                             const std::vector<MutationInstruction>& catalog,
                                             const std::string& current_code,
                                             const LanguageProfile& profile);

// Renders the fixed prompt template with the language display name, the
// instruction fragment (per-language variant applied) and the code verbatim.
PromptRequest buildPrompt(const LanguageProfile& profile,
                          const MutationInstruction& instruction, const std::string& code);

// Pulls program text out of a raw provider response: the first fenced code
// block when a fence exists, otherwise the response with leading/trailing
// prose lines trimmed, provided it mentions the function under test. Throws
// Error(ExtractionFailed) when no code is recognizable.
std::string extractCode(const std::string& raw_response, const LanguageProfile& profile);

// ---------------------------------------------------------------------------
// Providers
// ---------------------------------------------------------------------------

class MutationProvider {
 public:
  virtual ~MutationProvider() = default;
  // Returns the raw response text. Throws Error(ProviderTimeout) or
  // Error(ProviderUnavailable) per the provider contract.
  virtual std::string mutate(const PromptRequest& request) = 0;
  virtual std::string name() const = 0;
};

// Deterministic offline provider: a fixed table of per-language textual
// transformations keyed by instruction id. It keeps every downstream module
// testable without a model endpoint, so it is shipped as a first-class
// provider rather than test scaffolding. Each applied rule appends exactly
// one SP_MARK marker comment, which the fake-compiler fixtures use to derive
// scripted sizes.
class StubProvider : public MutationProvider {
 public:
  struct Options {
    // When > 0, the mutation that would bring the program to this step count
    // emits deliberately unparseable code (compile-gate testing).
    int break_at_step = 0;
  };

  StubProvider() = default;
  explicit StubProvider(Options options) : options_(options) {}

  std::string mutate(const PromptRequest& request) override;
  std::string name() const override { return "stub"; }

  // Number of SP_MARK markers in a piece of code; equals the number of stub
  // mutations applied to it.
  static int countMarkers(const std::string& code);

 private:
  Options options_;
};

// Chat-completion HTTP client. One single-turn request per mutation; opaque
// sampling parameters are passed through into the request body.
class RemoteProvider : public MutationProvider {
 public:
  struct Options {
    std::string endpoint;  // http://host:port/path
    std::string model;
    double request_timeout = 60.0;
    int max_retries = 3;                       // transport failures only
    double backoff_initial = 0.1;              // seconds, doubled per retry
    std::map<std::string, std::string> params; // merged into the request JSON
  };

  explicit RemoteProvider(Options options);

  std::string mutate(const PromptRequest& request) override;
  std::string name() const override { return "remote"; }

  // Exposed for tests: builds the JSON request body for a prompt.
  std::string requestBody(const PromptRequest& request) const;
  // Exposed for tests: pulls the message content out of a response body.
  static std::string parseResponseContent(const std::string& body);

 private:
  Options options_;
  std::string scheme_host_port_;
  std::string path_;
};

std::unique_ptr<MutationProvider> makeStubProvider(StubProvider::Options options = {});
std::unique_ptr<MutationProvider> makeRemoteProvider(RemoteProvider::Options options);

}  // namespace sizeprobe

#endif  // SIZEPROBE_MUTATION_HPP_
