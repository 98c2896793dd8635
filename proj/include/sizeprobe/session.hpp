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

#ifndef SIZEPROBE_SESSION_HPP_
#define SIZEPROBE_SESSION_HPP_

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

#include "sizeprobe/config.hpp"
#include "sizeprobe/core.hpp"
#include "sizeprobe/mutation.hpp"

namespace sizeprobe {

enum class EpisodeEnd {
  Violation,       // a candidate survived every filter
  ExhaustedSteps,  // max_steps mutations with nothing suspicious
  CompileFailure,  // the mutant (or its validation driver) stopped compiling
  ProviderFailure, // the provider produced no usable program
};

const char* toString(EpisodeEnd end);

struct EpisodeResult {
  EpisodeEnd end = EpisodeEnd::ExhaustedSteps;
  int steps = 0;  // mutations performed when the episode stopped
  std::optional<Violation> violation;
  std::string detail;
  nlohmann::json record;  // persisted, deterministic (no timing)
  // Compile outcomes backing a violation, for report emission.
  std::vector<CompileOutcome> violation_step_outcomes;
  std::vector<CompileOutcome> violation_baseline_outcomes;
};

// One seed-to-termination run of the mutate/compile/check loop.
EpisodeResult runEpisode(const CampaignConfig& config, MutationProvider& provider,
                         std::uint64_t episode_id, const std::filesystem::path& episode_dir);

struct CampaignResult {
  SessionStats stats;
  std::vector<std::string> report_files;
  std::filesystem::path stats_path;
  std::filesystem::path episodes_path;
  bool sanitizer_health_warning = false;
};

// Repeated episodes under an episode-count or wall-clock budget. Verifies
// the toolchain and the seed at startup (campaign-fatal on failure), runs
// `jobs` workers, and aggregates the per-episode records into SessionStats.
// Progress notes go to `log` when non-null.
CampaignResult runCampaign(const CampaignConfig& config, std::ostream* log = nullptr);

// Stats aggregation from persisted episode records, shared by the campaign
// itself and by consistency checks over episodes.jsonl.
SessionStats aggregateStats(const std::vector<nlohmann::json>& episode_records);

// Campaign-health heuristic: true when the sanitizer rejected more than 10%
// of all candidates, which points at an unhealthy mutation source rather
// than compiler defects.
bool sanitizerHealthWarning(const SessionStats& stats);

std::vector<nlohmann::json> readEpisodeRecords(const std::filesystem::path& jsonl_path);

nlohmann::json statsToJson(const SessionStats& stats);

}  // namespace sizeprobe

#endif  // SIZEPROBE_SESSION_HPP_
