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

#include "sizeprobe/session.hpp"

#include <algorithm>
#include <atomic>
#include <cctype>
#include <chrono>
#include <cstdio>
#include <fstream>
#include <mutex>
#include <ostream>
#include <thread>

#include "sizeprobe/filter.hpp"
#include "sizeprobe/report.hpp"
#include "sizeprobe/rng.hpp"
#include "sizeprobe/strategy.hpp"
#include "sizeprobe/toolchain.hpp"

namespace sizeprobe {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::string sanitizeForPath(const std::string& name) {
  std::string out;
  for (char c : name) {
    out.push_back(std::isalnum(static_cast<unsigned char>(c)) || c == '-' || c == '.' ? c
                                                                                      : '_');
  }
  return out;
}

std::string episodeName(std::uint64_t id) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "ep-%06llu", static_cast<unsigned long long>(id));
  return buf;
}

json outcomeToJson(const CompileOutcome& outcome) {
  json entry;
  entry["compiler_id"] = outcome.compiler_id;
  entry["opt_flag"] = outcome.opt_flag;
  entry["success"] = outcome.success;
  if (outcome.size) entry["size"] = outcome.size->value;
  if (!outcome.success) entry["diagnostics"] = outcome.diagnostics;
  return entry;
}

}  // namespace

const char* toString(EpisodeEnd end) {
  switch (end) {
    case EpisodeEnd::Violation: return "violation";
    case EpisodeEnd::ExhaustedSteps: return "exhausted_steps";
    case EpisodeEnd::CompileFailure: return "compile_failure";
    case EpisodeEnd::ProviderFailure: return "provider_failure";
  }
  return "unknown";
}

EpisodeResult runEpisode(const CampaignConfig& config, MutationProvider& provider,
                         std::uint64_t episode_id, const fs::path& episode_dir) {
  EpisodeResult result;
  Rng rng(Rng::deriveSeed(config.rng_seed, episode_id));
  auto compile_set = strategyCompileSet(config.strategy.strategy, config.compilers);
  // Matrix view handed to the strategy evaluator.
  std::vector<CompilerSpec> matrix =
      (config.strategy.strategy == Strategy::DeadCode ||
       config.strategy.strategy == Strategy::Pipeline)
          ? std::vector<CompilerSpec>{config.compilers.front()}
          : config.compilers;

  json record;
  record["episode"] = episodeName(episode_id);
  record["language"] = config.language;
  record["strategy"] = toString(config.strategy.strategy);
  record["candidates"] = 0;
  record["sanitizer_rejects"] = 0;
  json steps_json = json::array();

  auto finish = [&](EpisodeEnd end, int steps, std::string detail) {
    result.end = end;
    result.steps = steps;
    result.detail = std::move(detail);
    record["end"] = toString(end);
    record["steps"] = steps;
    record["step_records"] = steps_json;
    result.record = record;
    return result;
  };

  auto compileAll = [&](const SourceProgram& program, int step) {
    std::vector<CompileOutcome> outcomes;
    int index = 0;
    for (const auto& [spec, flag] : compile_set) {
      fs::path scratch = episode_dir / ("step-" + std::to_string(step)) /
                         (sanitizeForPath(spec.id) + "-" + std::to_string(index++));
      outcomes.push_back(compileToAsm(spec, flag, program, config.profile, scratch,
                                      config.compile_timeout, config.metric));
    }
    return outcomes;
  };

  auto referenceSize = [&](const std::vector<CompileOutcome>& outcomes,
                           const CompilerSpec& spec) -> std::optional<long long> {
    std::string wanted = config.strategy.reference_opt_flag.empty()
                             ? spec.size_opt_flag
                             : config.strategy.reference_opt_flag;
    for (const auto& outcome : outcomes) {
      if (outcome.compiler_id == spec.id && outcome.opt_flag == wanted && outcome.success &&
          outcome.size) {
        return outcome.size->value;
      }
    }
    return std::nullopt;
  };

  SourceProgram current = seedFor(config.language);
  std::vector<CompileOutcome> baseline_outcomes = compileAll(current, 0);
  if (std::none_of(baseline_outcomes.begin(), baseline_outcomes.end(),
                   [](const CompileOutcome& o) { return o.success; })) {
    return finish(EpisodeEnd::CompileFailure, 0, "seed failed to compile");
  }

  // Per-compiler reference-flag size history, step 0 first, feeding the
  // monotonic-size filter.
  std::vector<std::vector<long long>> histories(config.compilers.size());
  for (std::size_t i = 0; i < config.compilers.size(); ++i) {
    if (auto size = referenceSize(baseline_outcomes, config.compilers[i])) {
      histories[i].push_back(*size);
    }
  }

  for (int step = 1; step <= config.max_steps; ++step) {
    json step_record;
    const MutationInstruction* instruction = nullptr;
    try {
      instruction = &sampleInstruction(config.strategy.strategy, rng, config.catalog,
                                       current.code, config.profile);
    } catch (const Error& e) {
      return finish(EpisodeEnd::ProviderFailure, step - 1, e.what());
    }
    step_record["instruction"] = instruction->id;

    PromptRequest request = buildPrompt(config.profile, *instruction, current.code);
    std::string mutated_code;
    try {
      std::string raw = provider.mutate(request);
      try {
        mutated_code = extractCode(raw, config.profile);
      } catch (const Error& extraction_error) {
        if (extraction_error.code() != Errc::ExtractionFailed) throw;
        // One retry with the same prompt, then the episode aborts.
        raw = provider.mutate(request);
        mutated_code = extractCode(raw, config.profile);
      }
    } catch (const Error& e) {
      steps_json.push_back(step_record);
      return finish(EpisodeEnd::ProviderFailure, step - 1, e.what());
    }

    SourceProgram mutant;
    mutant.language = current.language;
    mutant.code = mutated_code;
    mutant.step_index = step;
    mutant.lineage = current.lineage;
    mutant.lineage.push_back(instruction->id);
    mutant.parent_digest = contentDigest(current.code);

    std::vector<CompileOutcome> outcomes = compileAll(mutant, step);
    json outcome_json = json::array();
    for (const auto& outcome : outcomes) outcome_json.push_back(outcomeToJson(outcome));
    step_record["outcomes"] = outcome_json;

    if (std::none_of(outcomes.begin(), outcomes.end(),
                     [](const CompileOutcome& o) { return o.success; })) {
      steps_json.push_back(step_record);
      return finish(EpisodeEnd::CompileFailure, step,
                    outcomes.empty() ? "no outcomes" : outcomes.front().diagnostics);
    }

    for (std::size_t i = 0; i < config.compilers.size(); ++i) {
      if (auto size = referenceSize(outcomes, config.compilers[i])) {
        histories[i].push_back(*size);
      }
    }

    std::optional<ViolationCandidate> candidate;
    try {
      candidate = evaluateStrategy(config.strategy, matrix, outcomes, baseline_outcomes,
                                   mutant);
    } catch (const Error& e) {
      if (e.code() != Errc::DegenerateBaseline) throw;
      candidate.reset();
    }

    if (candidate) {
      step_record["candidate"] = candidate->inequality;
      std::vector<long long> reference_sizes;
      for (std::size_t i = 0; i < config.compilers.size(); ++i) {
        if (config.compilers[i].id == candidate->offender.compiler_id) {
          reference_sizes = histories[i];
        }
      }
      FilterOutcome filtered = runFilterPipeline(
          *candidate, reference_sizes, current.code, config.profile, config.validation,
          episode_dir / ("step-" + std::to_string(step)) / "filters", config.filters);

      json evidence_json = json::array();
      bool signature_corrupted = false;
      for (const auto& evidence : filtered.evidence) {
        json entry;
        entry["filter"] = evidence.filter;
        entry["verdict"] = toString(evidence.verdict);
        entry["detail"] = evidence.detail;
        evidence_json.push_back(entry);
        if (evidence.verdict == FilterVerdict::Reject) {
          if (evidence.detail.find("no longer defines") != std::string::npos) {
            signature_corrupted = true;
          }
          if (evidence.filter == "sanitizer") {
            record["sanitizer_rejects"] = record["sanitizer_rejects"].get<int>() + 1;
          }
        }
      }
      step_record["filter_evidence"] = evidence_json;
      record["candidates"] = record["candidates"].get<int>() + 1;

      if (filtered.passed) {
        Violation violation;
        violation.candidate = *candidate;
        violation.filter_evidence = filtered.evidence;
        result.violation = violation;
        result.violation_step_outcomes = outcomes;
        result.violation_baseline_outcomes = baseline_outcomes;
        record["violation_inequality"] = candidate->inequality;
        steps_json.push_back(step_record);
        return finish(EpisodeEnd::Violation, step, candidate->inequality);
      }
      if (signature_corrupted) {
        // The validation driver no longer builds around the mutant; treated
        // as a compile failure, the loop restarts from the seed.
        steps_json.push_back(step_record);
        return finish(EpisodeEnd::CompileFailure, step, "function signature corrupted");
      }
    }

    steps_json.push_back(step_record);
    current = mutant;
  }

  return finish(EpisodeEnd::ExhaustedSteps, config.max_steps, "no violation found");
}

SessionStats aggregateStats(const std::vector<json>& episode_records) {
  SessionStats stats;
  long long steps_sum = 0;
  bool first = true;
  for (const auto& record : episode_records) {
    std::string end = record.value("end", std::string());
    if (end == "provider_failure") {
      // No program was produced; not counted.
      continue;
    }
    int steps = record.value("steps", 0);
    ++stats.total_programs;
    if (end != "compile_failure") ++stats.compilable;
    if (end == "violation") ++stats.violations;
    steps_sum += steps;
    if (first) {
      stats.steps_min = steps;
      stats.steps_max = steps;
      first = false;
    } else {
      stats.steps_min = std::min(stats.steps_min, steps);
      stats.steps_max = std::max(stats.steps_max, steps);
    }
    stats.candidates_total += record.value("candidates", 0);
    stats.candidates_rejected_sanitizer += record.value("sanitizer_rejects", 0);
  }
  if (stats.total_programs > 0) {
    stats.steps_mean = static_cast<double>(steps_sum) / static_cast<double>(stats.total_programs);
  }
  return stats;
}

bool sanitizerHealthWarning(const SessionStats& stats) {
  return stats.candidates_total > 0 &&
         stats.candidates_rejected_sanitizer * 10 > stats.candidates_total;
}

json statsToJson(const SessionStats& stats) {
  json doc;
  doc["total_programs"] = stats.total_programs;
  doc["compilable"] = stats.compilable;
  doc["violations"] = stats.violations;
  doc["steps_min"] = stats.steps_min;
  doc["steps_mean"] = stats.steps_mean;
  doc["steps_max"] = stats.steps_max;
  doc["candidates_total"] = stats.candidates_total;
  doc["candidates_rejected_sanitizer"] = stats.candidates_rejected_sanitizer;
  return doc;
}

std::vector<json> readEpisodeRecords(const fs::path& jsonl_path) {
  std::vector<json> records;
  std::ifstream in(jsonl_path);
  if (!in) {
    throw Error(Errc::IoError, "cannot read " + jsonl_path.string());
  }
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    records.push_back(json::parse(line));
  }
  return records;
}

CampaignResult runCampaign(const CampaignConfig& config, std::ostream* log) {
  fs::path campaign_dir = fs::path(config.workdir) / sanitizeForPath(config.campaign_id);
  fs::create_directories(campaign_dir);
  fs::path reports_dir = campaign_dir / "reports";
  // Episode artifacts live at <workdir>/<campaign-id>/<episode-id>/<step>/.
  fs::path episodes_dir = campaign_dir;

  auto compile_set = strategyCompileSet(config.strategy.strategy, config.compilers);
  preflightToolchain(compile_set, config.profile, campaign_dir / "preflight",
                     config.compile_timeout, config.metric);

  auto makeProvider = [&]() -> std::unique_ptr<MutationProvider> {
    if (config.provider.kind == "remote") {
      RemoteProvider::Options options;
      options.endpoint = config.provider.endpoint;
      options.model = config.provider.model;
      options.request_timeout = config.provider.request_timeout;
      options.params = config.provider.params;
      return makeRemoteProvider(std::move(options));
    }
    StubProvider::Options options;
    options.break_at_step = config.provider.stub_break_at_step;
    return makeStubProvider(options);
  };

  auto start = std::chrono::steady_clock::now();
  auto withinBudget = [&]() {
    if (config.time_budget_seconds <= 0.0) return true;
    double elapsed =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return elapsed < config.time_budget_seconds;
  };

  std::atomic<std::uint64_t> next_id{0};
  std::mutex sink_mutex;
  std::vector<std::pair<std::uint64_t, json>> records;
  std::vector<std::pair<std::uint64_t, std::string>> report_files;

  auto worker = [&]() {
    auto provider = makeProvider();
    for (;;) {
      std::uint64_t id = next_id.fetch_add(1);
      // A zero budget runs zero episodes and reports empty stats.
      if (config.episode_count <= 0 && config.time_budget_seconds <= 0.0) return;
      if (config.episode_count > 0 && id >= static_cast<std::uint64_t>(config.episode_count)) {
        return;
      }
      if (!withinBudget()) return;

      EpisodeResult episode =
          runEpisode(config, *provider, id, episodes_dir / episodeName(id));

      std::string report_file;
      if (episode.end == EpisodeEnd::Violation && episode.violation) {
        std::string name = "violation-" + episodeName(id);
        ReportPaths paths =
            emitReport(*episode.violation, episode.violation_step_outcomes,
                       episode.violation_baseline_outcomes, config, reports_dir, name);
        episode.violation->report_path = paths.json.string();
        episode.record["report"] = "reports/" + paths.json.filename().string();
        report_file = paths.json.string();
      }

      std::lock_guard<std::mutex> lock(sink_mutex);
      records.emplace_back(id, episode.record);
      if (!report_file.empty()) report_files.emplace_back(id, report_file);
      if (log != nullptr) {
        (*log) << episodeName(id) << ": " << toString(episode.end) << " after "
               << episode.steps << " step(s)" << std::endl;
      }
    }
  };

  if (config.jobs <= 1) {
    worker();
  } else {
    std::vector<std::thread> threads;
    for (int i = 0; i < config.jobs; ++i) threads.emplace_back(worker);
    for (auto& thread : threads) thread.join();
  }

  std::sort(records.begin(), records.end(),
            [](const auto& a, const auto& b) { return a.first < b.first; });
  std::sort(report_files.begin(), report_files.end(),
            [](const auto& a, const auto& b) { return a.first < b.first; });

  CampaignResult campaign;
  campaign.episodes_path = campaign_dir / "episodes.jsonl";
  {
    std::ofstream out(campaign.episodes_path);
    if (!out) {
      throw Error(Errc::IoError, "cannot write " + campaign.episodes_path.string());
    }
    std::vector<json> bare;
    bare.reserve(records.size());
    for (const auto& [id, record] : records) {
      out << record.dump() << "\n";
      bare.push_back(record);
    }
    campaign.stats = aggregateStats(bare);
  }
  for (const auto& [id, file] : report_files) campaign.report_files.push_back(file);

  campaign.sanitizer_health_warning = sanitizerHealthWarning(campaign.stats);

  campaign.stats_path = campaign_dir / "stats.json";
  {
    json doc = statsToJson(campaign.stats);
    doc["campaign_id"] = config.campaign_id;
    doc["language"] = config.language;
    doc["strategy"] = toString(config.strategy.strategy);
    doc["max_steps"] = config.max_steps;
    std::ofstream out(campaign.stats_path);
    out << doc.dump(2) << "\n";
  }

  if (log != nullptr) {
    const SessionStats& stats = campaign.stats;
    (*log) << "campaign '" << config.campaign_id << "': " << stats.total_programs
           << " programs, " << stats.compilable << " compilable, " << stats.violations
           << " violations, steps mean " << stats.steps_mean << " (min " << stats.steps_min
           << " / max " << stats.steps_max << ")" << std::endl;
    if (campaign.sanitizer_health_warning) {
      (*log) << "warning: sanitizer rejected more than 10% of candidates ("
             << stats.candidates_rejected_sanitizer << "/" << stats.candidates_total
             << "); the mutation source looks unhealthy" << std::endl;
    }
  }
  return campaign;
}

}  // namespace sizeprobe
