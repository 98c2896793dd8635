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

#include <filesystem>
#include <iostream>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "sizeprobe/catalog.hpp"
#include "sizeprobe/config.hpp"
#include "sizeprobe/core.hpp"
#include "sizeprobe/dedup.hpp"
#include "sizeprobe/report.hpp"
#include "sizeprobe/session.hpp"
#include "sizeprobe/subprocess.hpp"

namespace fs = std::filesystem;
using namespace sizeprobe;

namespace {

struct RunFlags {
  std::string config_file;
  ConfigOverrides overrides;
};

void addOverrideOptions(CLI::App* cmd, RunFlags& flags) {
  cmd->add_option("--config", flags.config_file, "Campaign config file (JSON)");
  cmd->add_option("--language", flags.overrides.language, "Language profile id (c, cpp, rust, swift)");
  cmd->add_option("--strategy", flags.overrides.strategy,
                  "dead_code | pipeline | single_compiler | multi_compiler");
  cmd->add_option("--compilers", flags.overrides.compilers_file, "Compiler matrix file (JSON)");
  cmd->add_option("--provider", flags.overrides.provider_kind, "remote | stub");
  cmd->add_option("--endpoint", flags.overrides.endpoint, "Chat-completion endpoint URL");
  cmd->add_option("--model", flags.overrides.model, "Model name for the remote provider");
  cmd->add_option("--time-budget", flags.overrides.time_budget, "Wall-clock budget in seconds");
  cmd->add_option("--episodes", flags.overrides.episodes, "Episode count (overrides the time budget)");
  cmd->add_option("--max-steps", flags.overrides.max_steps, "Mutations per episode (default 10)");
  cmd->add_option("--threshold-pipeline", flags.overrides.threshold_pipeline,
                  "Pipeline sensitivity threshold (default 0.05)");
  cmd->add_option("--threshold-multi", flags.overrides.threshold_multi,
                  "Multi-compiler threshold (default 0.10)");
  cmd->add_option("--threshold-single", flags.overrides.threshold_single,
                  "Single-compiler threshold (default 0)");
  cmd->add_option("--seed", flags.overrides.seed, "Campaign RNG seed");
  cmd->add_option("--workdir", flags.overrides.workdir, "Scratch and report directory");
  cmd->add_option("--campaign-id", flags.overrides.campaign_id, "Campaign directory name");
  cmd->add_option("--jobs", flags.overrides.jobs, "Concurrent episode workers (default 1)");
  cmd->add_option("--catalog", flags.overrides.catalog_file, "Mutation instruction catalog file");
}

CompilerSpec specWithBinary(CompilerSpec spec, const std::string& binary) {
  auto tokens = splitCommand(spec.invocation);
  if (!tokens.empty()) {
    std::string rebuilt = binary;
    for (std::size_t i = 1; i < tokens.size(); ++i) rebuilt += " " + tokens[i];
    spec.invocation = rebuilt;
  }
  return spec;
}

int cmdRun(const RunFlags& flags) {
  CampaignConfig config = loadConfigFromSystem(flags.config_file, flags.overrides);
  CampaignResult result = runCampaign(config, &std::cerr);
  std::cout << statsToJson(result.stats).dump(2) << "\n";
  for (const auto& file : result.report_files) {
    std::cout << "report: " << file << "\n";
  }
  return 0;
}

int cmdVerify(const std::vector<std::string>& reports, const std::string& corpus_manifest,
              const std::vector<std::string>& corpus_compilers, bool no_recompile,
              const std::string& workdir) {
  fs::path scratch = fs::path(workdir.empty() ? "sizeprobe-work" : workdir) / "verify";

  if (!corpus_manifest.empty()) {
    std::map<std::string, std::vector<CompilerSpec>> matrices;
    for (const auto& pair : corpus_compilers) {
      std::size_t eq = pair.find('=');
      if (eq == std::string::npos) {
        std::cerr << "error: --corpus-compilers expects lang=file, got '" << pair << "'\n";
        return 2;
      }
      matrices[pair.substr(0, eq)] = loadCompilersFile(pair.substr(eq + 1));
    }
    auto entries = loadCorpusManifest(corpus_manifest);
    auto results = checkCorpus(entries, fs::path(corpus_manifest).parent_path(), matrices,
                               StrategyConfig{}, scratch);
    for (const auto& result : results) {
      const char* status = result.status == CorpusResult::Status::Trigger      ? "trigger"
                           : result.status == CorpusResult::Status::NoTrigger ? "no-trigger"
                                                                              : "skipped";
      std::cout << result.entry.file << ": " << status;
      if (!result.detail.empty()) std::cout << " (" << result.detail << ")";
      std::cout << "\n";
    }
    return 0;
  }

  if (reports.empty()) {
    std::cerr << "error: pass report files or --corpus\n";
    return 2;
  }
  bool all_match = true;
  int index = 0;
  for (const auto& path : reports) {
    ReportData report = parseReportFile(path);
    VerifyResult result =
        verifyReport(report, scratch / ("report-" + std::to_string(index++)), !no_recompile);
    std::cout << path << ": " << (result.decision_matches ? "MATCH" : "MISMATCH") << " ("
              << result.detail << ")\n";
    all_match = all_match && result.decision_matches;
  }
  return all_match ? 0 : 1;
}

int cmdScreen(const std::vector<std::string>& reports, const std::string& releases_file,
              const std::string& workdir) {
  std::vector<CompilerSpec> releases = loadCompilersFile(releases_file);
  fs::path scratch = fs::path(workdir.empty() ? "sizeprobe-work" : workdir) / "screen";

  std::vector<ViolationSignature> signatures;
  int index = 0;
  for (const auto& path : reports) {
    ReportData report = parseReportFile(path);
    fs::path report_scratch = scratch / ("report-" + std::to_string(index++));
    int version_index = 0;
    ViolationSignature signature = releaseScreen(releases, [&](const CompilerSpec& spec) {
      return rerunCheckWithCompiler(report, spec,
                                    report_scratch / ("v" + std::to_string(version_index++)));
    });
    if (report.signature && report.signature->culprit_revision) {
      signature.culprit_revision = report.signature->culprit_revision;
    }
    updateReportSignature(path, signature);
    std::cout << path << ": exhibits [";
    for (std::size_t i = 0; i < signature.exhibits.size(); ++i) {
      std::cout << (i > 0 ? ", " : "") << signature.version_ids[i] << "="
                << (signature.exhibits[i] != 0 ? "yes" : "no");
    }
    std::cout << "]\n";
    signatures.push_back(signature);
  }

  if (signatures.size() > 1) {
    std::vector<int> groups = groupSignatures(signatures);
    for (std::size_t i = 0; i < groups.size(); ++i) {
      std::cout << "group " << groups[i] << ": " << reports[i] << "\n";
    }
    for (const auto& [a, b] : possiblyRelatedPairs(signatures)) {
      std::cout << "possibly related: " << reports[a] << " and " << reports[b]
                << " (overlapping but unequal version sets)\n";
    }
  }
  return 0;
}

int cmdBisect(const std::string& report_path, const std::vector<std::string>& revisions,
              const std::string& provider_command, const std::string& workdir) {
  ReportData report = parseReportFile(report_path);
  const CompilerSpec* offender = nullptr;
  for (const auto& spec : report.compilers) {
    if (spec.id == report.trigger.offender.compiler_id) offender = &spec;
  }
  if (offender == nullptr) {
    std::cerr << "error: offender compiler spec missing from report\n";
    return 2;
  }
  fs::path scratch = fs::path(workdir.empty() ? "sizeprobe-work" : workdir) / "bisect";

  RevisionProbe probe = [&](std::size_t index) -> std::optional<bool> {
    RunResult provision = runCommand({provider_command, revisions[index]}, 600.0);
    if (provision.spawn_failed || provision.timed_out || provision.exit_code != 0) {
      std::cerr << revisions[index] << ": provider unavailable, skipped\n";
      return std::nullopt;
    }
    std::string binary = provision.out;
    while (!binary.empty() && (binary.back() == '\n' || binary.back() == '\r')) {
      binary.pop_back();
    }
    CompilerSpec at_revision = specWithBinary(*offender, binary);
    ExhibitResult result = rerunCheckWithCompiler(report, at_revision,
                                                  scratch / ("r" + std::to_string(index)));
    if (!result.compiled) return std::nullopt;
    std::cerr << revisions[index] << ": " << (result.triggered ? "triggers" : "clean")
              << "\n";
    return result.triggered;
  };

  BisectResult result = bisectFirstTrue(revisions.size(), probe);
  if (result.status != BisectResult::Status::Found) {
    std::cerr << "not bisectable: " << result.detail << "\n";
    return 1;
  }
  const std::string& culprit = revisions[result.first_bad_index];
  std::cout << "first bad revision: " << culprit << " (" << result.probes << " probes)\n";

  ViolationSignature signature =
      report.signature.value_or(ViolationSignature{});
  signature.culprit_revision = culprit;
  updateReportSignature(report_path, signature);
  return 0;
}

int cmdCatalog(const std::string& catalog_file, bool as_json) {
  auto catalog = catalog_file.empty() ? defaultCatalog() : loadCatalogFile(catalog_file);
  if (as_json) {
    std::cout << catalogToJson(catalog);
    return 0;
  }
  for (const auto& instruction : catalog) {
    std::cout << instruction.id << " [" << toString(instruction.category) << ", "
              << toString(instruction.deadness) << "]: \"" << instruction.text << "\"\n";
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"sizeprobe: LLM-driven mutation testing for missed code-size optimizations"};
  app.require_subcommand(1);

  RunFlags run_flags;
  CLI::App* run = app.add_subcommand("run", "Run a mutation testing campaign");
  addOverrideOptions(run, run_flags);

  std::vector<std::string> verify_reports;
  std::string corpus_manifest;
  std::vector<std::string> corpus_compilers;
  bool no_recompile = false;
  std::string verify_workdir;
  CLI::App* verify = app.add_subcommand("verify", "Re-check violation reports or the bug corpus");
  verify->add_option("reports", verify_reports, "Report files to re-check");
  verify->add_option("--corpus", corpus_manifest, "Corpus manifest to check instead");
  verify->add_option("--corpus-compilers", corpus_compilers,
                     "lang=compilers-file pairs for corpus checking");
  verify->add_flag("--no-recompile", no_recompile, "Arithmetic re-check only");
  verify->add_option("--workdir", verify_workdir, "Scratch directory");

  std::vector<std::string> screen_reports;
  std::string releases_file;
  std::string screen_workdir;
  CLI::App* screen = app.add_subcommand("screen", "Re-check reports across released compiler versions");
  screen->add_option("reports", screen_reports, "Report files")->required();
  screen->add_option("--releases", releases_file, "Release matrix file, oldest to newest")
      ->required();
  screen->add_option("--workdir", screen_workdir, "Scratch directory");

  std::string bisect_report;
  std::vector<std::string> bisect_revisions;
  std::string provider_command;
  std::string bisect_workdir;
  CLI::App* bisect = app.add_subcommand("bisect", "Find the first revision exhibiting a violation");
  bisect->add_option("report", bisect_report, "Report file")->required();
  bisect->add_option("--revisions", bisect_revisions, "Ordered revision ids, oldest to newest")
      ->required();
  bisect->add_option("--provider-command", provider_command,
                     "Command invoked as <cmd> <revision>; prints a compiler path")
      ->required();
  bisect->add_option("--workdir", bisect_workdir, "Scratch directory");

  std::string catalog_file;
  bool catalog_json = false;
  CLI::App* catalog = app.add_subcommand("catalog", "Print the mutation instruction catalog");
  catalog->add_option("--catalog", catalog_file, "Catalog file (default: built-in)");
  catalog->add_flag("--json", catalog_json, "Emit JSON");

  CLI11_PARSE(app, argc, argv);

  try {
    if (run->parsed()) return cmdRun(run_flags);
    if (verify->parsed()) {
      return cmdVerify(verify_reports, corpus_manifest, corpus_compilers, no_recompile,
                       verify_workdir);
    }
    if (screen->parsed()) return cmdScreen(screen_reports, releases_file, screen_workdir);
    if (bisect->parsed()) {
      return cmdBisect(bisect_report, bisect_revisions, provider_command, bisect_workdir);
    }
    if (catalog->parsed()) return cmdCatalog(catalog_file, catalog_json);
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
