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

#include <cstdlib>
#include <fstream>
#include <set>
#include <sstream>

#include "json.hpp"

#include "sizeprobe/catalog.hpp"
#include "sizeprobe/profile.hpp"

namespace sizeprobe {

using nlohmann::json;

namespace {

std::string readTextFile(const std::string& path, const char* what) {
  std::ifstream in(path);
  if (!in) {
    throw Error(Errc::ConfigError, std::string(what) + ": cannot open '" + path + "'");
  }
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

CompilerSpec compilerFromJson(const json& entry) {
  CompilerSpec spec;
  try {
    spec.id = entry.at("id").get<std::string>();
    spec.invocation = entry.value("invocation", std::string());
    spec.version_label = entry.value("version_label", std::string());
    spec.channel = channelFromString(entry.value("channel", std::string("release")));
    spec.size_opt_flag = entry.value("size_opt_flag", std::string("-Os"));
    spec.perf_opt_flag = entry.value("perf_opt_flag", std::string("-O3"));
    spec.other_flags = entry.value("other_flags", std::string());
    spec.object_invocation = entry.value("object_invocation", std::string());
    if (entry.contains("extra_opt_flags")) {
      for (const auto& flag : entry.at("extra_opt_flags")) {
        spec.extra_opt_flags.push_back(flag.get<std::string>());
      }
    }
  } catch (const json::exception& e) {
    throw Error(Errc::ConfigError, std::string("compilers: malformed entry: ") + e.what());
  }
  return spec;
}

Fraction thresholdFraction(double value, const char* key) {
  if (value < 0.0 || value > 1.0) {
    throw Error(Errc::ConfigError,
                std::string(key) + ": must be within [0, 1], got " + std::to_string(value));
  }
  return Fraction::fromDecimal(value);
}

}  // namespace

std::vector<CompilerSpec> parseCompilers(const std::string& json_text) {
  json doc;
  try {
    doc = json::parse(json_text);
  } catch (const json::exception& e) {
    throw Error(Errc::ConfigError, std::string("compilers: invalid JSON: ") + e.what());
  }
  if (!doc.is_array()) {
    throw Error(Errc::ConfigError, "compilers: top-level value must be a list");
  }
  std::vector<CompilerSpec> specs;
  for (const auto& entry : doc) specs.push_back(compilerFromJson(entry));
  return specs;
}

std::vector<CompilerSpec> loadCompilersFile(const std::string& path) {
  return parseCompilers(readTextFile(path, "compilers"));
}

void validateConfig(const CampaignConfig& config) {
  if (!builtinProfiles().count(config.language)) {
    throw Error(Errc::ConfigError, "language: no profile for '" + config.language + "'");
  }
  if (config.max_steps < 1) {
    throw Error(Errc::ConfigError, "max_steps: must be >= 1");
  }
  if (config.jobs < 1) {
    throw Error(Errc::ConfigError, "jobs: must be >= 1");
  }

  for (const Fraction* threshold : {&config.strategy.pipeline_threshold,
                                    &config.strategy.multi_compiler_threshold,
                                    &config.strategy.single_compiler_threshold}) {
    if (threshold->num < 0 || threshold->num > threshold->den) {
      throw Error(Errc::ConfigError, "threshold: must be within [0, 1]");
    }
  }

  std::set<std::string> ids;
  for (const auto& spec : config.compilers) {
    if (spec.id.empty()) {
      throw Error(Errc::ConfigError, "compilers: entry with empty id");
    }
    if (!ids.insert(spec.id).second) {
      throw Error(Errc::ConfigError, "compilers: duplicate id '" + spec.id + "'");
    }
    if (spec.invocation.empty()) {
      throw Error(Errc::ConfigError, "compilers: '" + spec.id + "' has no invocation");
    }
    if (spec.invocation.find("{input}") == std::string::npos ||
        spec.invocation.find("{output}") == std::string::npos) {
      throw Error(Errc::ConfigError, "compilers: '" + spec.id +
                                         "' invocation must contain {input} and {output}");
    }
  }

  switch (config.strategy.strategy) {
    case Strategy::DeadCode:
    case Strategy::Pipeline:
      if (config.compilers.empty()) {
        throw Error(Errc::ConfigError, "compilers: need >=1");
      }
      break;
    case Strategy::SingleCompiler:
      if (config.compilers.size() < 2) {
        throw Error(Errc::ConfigError, "compilers: need >=2 versions of one compiler");
      }
      if (config.compilers.back().channel != Channel::Trunk) {
        throw Error(Errc::ConfigError,
                    "compilers: the newest (last) entry must have channel trunk");
      }
      break;
    case Strategy::MultiCompiler:
      if (config.compilers.size() < 2) {
        throw Error(Errc::ConfigError, "compilers: need >=2");
      }
      break;
  }

  if (config.provider.kind == "remote") {
    if (config.provider.endpoint.empty()) {
      throw Error(Errc::ConfigError, "endpoint: required for the remote provider");
    }
    if (config.provider.model.empty()) {
      throw Error(Errc::ConfigError, "model: required for the remote provider");
    }
  } else if (config.provider.kind != "stub") {
    throw Error(Errc::ConfigError, "provider: must be 'remote' or 'stub'");
  }

  if (config.metric.metric == SizeMetric::TextSectionBytes) {
    if (config.metric.size_tool_command.empty()) {
      throw Error(Errc::ConfigError,
                  "size_tool_command: required for the text_section_bytes metric");
    }
    for (const auto& spec : config.compilers) {
      if (spec.object_invocation.empty()) {
        throw Error(Errc::ConfigError, "compilers: '" + spec.id +
                                           "' needs object_invocation for "
                                           "text_section_bytes");
      }
    }
  }

  if (config.strategy.strategy == Strategy::DeadCode &&
      config.filters.require_dead_code_filter &&
      config.validation.coverage_invocation.empty()) {
    throw Error(Errc::ConfigError,
                "coverage_invocation: the dead_code strategy requires coverage tooling "
                "(or clear require_dead_code_filter)");
  }

  validateCatalog(config.catalog);
}

CampaignConfig loadConfig(const std::string& config_path,
                          const std::map<std::string, std::string>& env,
                          const ConfigOverrides& overrides) {
  CampaignConfig config;
  std::string catalog_file;
  std::optional<std::vector<long long>> driver_inputs;

  if (!config_path.empty()) {
    json doc;
    try {
      doc = json::parse(readTextFile(config_path, "config"));
    } catch (const json::exception& e) {
      throw Error(Errc::ConfigError, std::string("config: invalid JSON: ") + e.what());
    }
    try {
      config.language = doc.value("language", config.language);
      if (doc.contains("strategy")) {
        config.strategy.strategy = strategyFromString(doc.at("strategy").get<std::string>());
      }
      if (doc.contains("compilers_file")) {
        config.compilers = loadCompilersFile(doc.at("compilers_file").get<std::string>());
      }
      if (doc.contains("compilers")) {
        config.compilers.clear();
        for (const auto& entry : doc.at("compilers")) {
          config.compilers.push_back(compilerFromJson(entry));
        }
      }
      if (doc.contains("provider")) {
        const json& p = doc.at("provider");
        config.provider.kind = p.value("kind", config.provider.kind);
        config.provider.endpoint = p.value("endpoint", config.provider.endpoint);
        config.provider.model = p.value("model", config.provider.model);
        config.provider.request_timeout =
            p.value("request_timeout", config.provider.request_timeout);
        config.provider.stub_break_at_step =
            p.value("stub_break_at_step", config.provider.stub_break_at_step);
        if (p.contains("params")) {
          for (const auto& [key, value] : p.at("params").items()) {
            config.provider.params[key] =
                value.is_string() ? value.get<std::string>() : value.dump();
          }
        }
      }
      if (doc.contains("pipeline_threshold")) {
        config.strategy.pipeline_threshold =
            thresholdFraction(doc.at("pipeline_threshold").get<double>(), "pipeline_threshold");
      }
      if (doc.contains("multi_compiler_threshold")) {
        config.strategy.multi_compiler_threshold = thresholdFraction(
            doc.at("multi_compiler_threshold").get<double>(), "multi_compiler_threshold");
      }
      if (doc.contains("single_compiler_threshold")) {
        config.strategy.single_compiler_threshold = thresholdFraction(
            doc.at("single_compiler_threshold").get<double>(), "single_compiler_threshold");
      }
      config.strategy.reference_opt_flag =
          doc.value("reference_opt_flag", config.strategy.reference_opt_flag);
      config.max_steps = doc.value("max_steps", config.max_steps);
      config.episode_count = doc.value("episodes", config.episode_count);
      config.time_budget_seconds = doc.value("time_budget", config.time_budget_seconds);
      config.rng_seed = doc.value("seed", config.rng_seed);
      config.workdir = doc.value("workdir", config.workdir);
      config.campaign_id = doc.value("campaign_id", config.campaign_id);
      config.jobs = doc.value("jobs", config.jobs);
      config.compile_timeout = doc.value("compile_timeout", config.compile_timeout);
      config.run_timeout = doc.value("run_timeout", config.run_timeout);
      if (doc.contains("metric")) {
        config.metric.metric = metricFromString(doc.at("metric").get<std::string>());
      }
      config.metric.size_tool_command =
          doc.value("size_tool_command", config.metric.size_tool_command);
      config.validation.sanitizer_invocation =
          doc.value("sanitizer_invocation", config.validation.sanitizer_invocation);
      config.validation.coverage_invocation =
          doc.value("coverage_invocation", config.validation.coverage_invocation);
      config.validation.coverage_report_command =
          doc.value("coverage_report_command", config.validation.coverage_report_command);
      config.validation.external_validator_command = doc.value(
          "external_validator_command", config.validation.external_validator_command);
      config.filters.monotonic_any_decrease =
          doc.value("monotonic_any_decrease", config.filters.monotonic_any_decrease);
      config.filters.require_dead_code_filter =
          doc.value("require_dead_code_filter", config.filters.require_dead_code_filter);
      catalog_file = doc.value("catalog_file", catalog_file);
      if (doc.contains("driver_inputs")) {
        std::vector<long long> inputs;
        for (const auto& value : doc.at("driver_inputs")) {
          inputs.push_back(value.get<long long>());
        }
        driver_inputs = std::move(inputs);
      }
    } catch (const json::exception& e) {
      throw Error(Errc::ConfigError, std::string("config: ") + e.what());
    }
  }

  // Environment sits between the config file and explicit flags.
  if (auto it = env.find("SIZEPROBE_LLM_ENDPOINT"); it != env.end() && !it->second.empty()) {
    config.provider.endpoint = it->second;
  }
  if (auto it = env.find("SIZEPROBE_LLM_MODEL"); it != env.end() && !it->second.empty()) {
    config.provider.model = it->second;
  }

  if (overrides.language) config.language = *overrides.language;
  if (overrides.strategy) config.strategy.strategy = strategyFromString(*overrides.strategy);
  if (overrides.compilers_file) config.compilers = loadCompilersFile(*overrides.compilers_file);
  if (overrides.provider_kind) config.provider.kind = *overrides.provider_kind;
  if (overrides.endpoint) config.provider.endpoint = *overrides.endpoint;
  if (overrides.model) config.provider.model = *overrides.model;
  if (overrides.workdir) config.workdir = *overrides.workdir;
  if (overrides.campaign_id) config.campaign_id = *overrides.campaign_id;
  if (overrides.catalog_file) catalog_file = *overrides.catalog_file;
  if (overrides.time_budget) config.time_budget_seconds = *overrides.time_budget;
  if (overrides.episodes) config.episode_count = *overrides.episodes;
  if (overrides.max_steps) config.max_steps = *overrides.max_steps;
  if (overrides.jobs) config.jobs = *overrides.jobs;
  if (overrides.seed) config.rng_seed = *overrides.seed;
  if (overrides.threshold_pipeline) {
    config.strategy.pipeline_threshold =
        thresholdFraction(*overrides.threshold_pipeline, "threshold-pipeline");
  }
  if (overrides.threshold_multi) {
    config.strategy.multi_compiler_threshold =
        thresholdFraction(*overrides.threshold_multi, "threshold-multi");
  }
  if (overrides.threshold_single) {
    config.strategy.single_compiler_threshold =
        thresholdFraction(*overrides.threshold_single, "threshold-single");
  }

  config.catalog = catalog_file.empty() ? defaultCatalog() : loadCatalogFile(catalog_file);

  try {
    config.profile = profileFor(config.language);
  } catch (const Error&) {
    throw Error(Errc::ConfigError, "language: no profile for '" + config.language + "'");
  }
  if (driver_inputs) config.profile.driver_inputs = *driver_inputs;

  // Copy the shared timeouts into the validation tooling.
  config.validation.compile_timeout = config.compile_timeout;
  config.validation.run_timeout = config.run_timeout;

  validateConfig(config);
  return config;
}

CampaignConfig loadConfigFromSystem(const std::string& config_path,
                                    const ConfigOverrides& overrides) {
  std::map<std::string, std::string> env;
  for (const char* key : {"SIZEPROBE_LLM_ENDPOINT", "SIZEPROBE_LLM_MODEL"}) {
    if (const char* value = std::getenv(key)) env[key] = value;
  }
  return loadConfig(config_path, env, overrides);
}

}  // namespace sizeprobe
