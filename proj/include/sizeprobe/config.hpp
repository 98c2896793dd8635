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

#ifndef SIZEPROBE_CONFIG_HPP_
#define SIZEPROBE_CONFIG_HPP_

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "sizeprobe/core.hpp"
#include "sizeprobe/filter.hpp"
#include "sizeprobe/strategy.hpp"
#include "sizeprobe/toolchain.hpp"

namespace sizeprobe {

struct ProviderConfig {
  std::string kind = "stub";  // "stub" or "remote"
  std::string endpoint;
  std::string model;
  double request_timeout = 60.0;
  std::map<std::string, std::string> params;  // passed through to the endpoint
  int stub_break_at_step = 0;
};

struct CampaignConfig {
  std::string language = "c";
  StrategyConfig strategy;
  std::vector<CompilerSpec> compilers;
  ProviderConfig provider;
  int max_steps = 10;
  long long episode_count = 0;       // 0 = run on the time budget
  double time_budget_seconds = 0.0;  // 0 = run on the episode count
  std::uint64_t rng_seed = 0;
  std::string workdir = "sizeprobe-work";
  std::string campaign_id = "campaign";
  int jobs = 1;
  double compile_timeout = 30.0;
  double run_timeout = 5.0;
  MetricConfig metric;
  ValidationTools validation;
  FilterConfig filters;
  std::vector<MutationInstruction> catalog;
  LanguageProfile profile;  // resolved for `language` at load time
};

// Command-line values that take precedence over environment and file.
struct ConfigOverrides {
  std::optional<std::string> language;
  std::optional<std::string> strategy;
  std::optional<std::string> compilers_file;
  std::optional<std::string> provider_kind;
  std::optional<std::string> endpoint;
  std::optional<std::string> model;
  std::optional<std::string> workdir;
  std::optional<std::string> campaign_id;
  std::optional<std::string> catalog_file;
  std::optional<double> time_budget;
  std::optional<long long> episodes;
  std::optional<int> max_steps;
  std::optional<int> jobs;
  std::optional<double> threshold_pipeline;
  std::optional<double> threshold_multi;
  std::optional<double> threshold_single;
  std::optional<std::uint64_t> seed;
};

// Merges flags > environment > config file > defaults and validates the
// result. Pass an empty path to start from defaults. Recognized environment
// keys: SIZEPROBE_LLM_ENDPOINT, SIZEPROBE_LLM_MODEL. Throws
// Error(ConfigError) naming the offending key.
CampaignConfig loadConfig(const std::string& config_path,
                          const std::map<std::string, std::string>& env,
                          const ConfigOverrides& overrides);

// loadConfig against the process environment.
CampaignConfig loadConfigFromSystem(const std::string& config_path,
                                    const ConfigOverrides& overrides);

// Compiler matrix file: a JSON list of CompilerSpec records.
std::vector<CompilerSpec> loadCompilersFile(const std::string& path);
std::vector<CompilerSpec> parseCompilers(const std::string& json_text);

void validateConfig(const CampaignConfig& config);

}  // namespace sizeprobe

#endif  // SIZEPROBE_CONFIG_HPP_
