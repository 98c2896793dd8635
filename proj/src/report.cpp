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

#include "sizeprobe/report.hpp"

#include <sys/stat.h>

#include <algorithm>
#include <fstream>
#include <sstream>

#include "json.hpp"

#include "sizeprobe/profile.hpp"
#include "sizeprobe/strategy.hpp"
#include "sizeprobe/subprocess.hpp"
#include "sizeprobe/toolchain.hpp"

namespace sizeprobe {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

void writeText(const fs::path& path, const std::string& content) {
  std::ofstream out(path);
  if (!out) {
    throw Error(Errc::IoError, "cannot write " + path.string());
  }
  out << content;
}

std::string readText(const fs::path& path) {
  std::ifstream in(path);
  if (!in) {
    throw Error(Errc::IoError, "cannot read " + path.string());
  }
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

json compilerToJson(const CompilerSpec& spec) {
  json entry;
  entry["id"] = spec.id;
  entry["invocation"] = spec.invocation;
  entry["version_label"] = spec.version_label;
  entry["channel"] = toString(spec.channel);
  entry["size_opt_flag"] = spec.size_opt_flag;
  entry["perf_opt_flag"] = spec.perf_opt_flag;
  entry["other_flags"] = spec.other_flags;
  if (!spec.extra_opt_flags.empty()) entry["extra_opt_flags"] = spec.extra_opt_flags;
  if (!spec.object_invocation.empty()) entry["object_invocation"] = spec.object_invocation;
  return entry;
}

CompilerSpec compilerFromJson(const json& entry) {
  CompilerSpec spec;
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
  return spec;
}

json sizeRefToJson(const SizeRef& ref) {
  return json{{"compiler_id", ref.compiler_id}, {"opt_flag", ref.opt_flag}, {"size", ref.size}};
}

SizeRef sizeRefFromJson(const json& entry) {
  SizeRef ref;
  ref.compiler_id = entry.at("compiler_id").get<std::string>();
  ref.opt_flag = entry.at("opt_flag").get<std::string>();
  ref.size = entry.at("size").get<long long>();
  return ref;
}

json evidenceToJson(const FilterEvidence& evidence) {
  json entry;
  entry["filter"] = evidence.filter;
  entry["verdict"] = toString(evidence.verdict);
  entry["required"] = evidence.required;
  entry["detail"] = evidence.detail;
  if (evidence.reject_step) entry["reject_step"] = *evidence.reject_step;
  return entry;
}

FilterEvidence evidenceFromJson(const json& entry) {
  FilterEvidence evidence;
  evidence.filter = entry.at("filter").get<std::string>();
  evidence.verdict = filterVerdictFromString(entry.at("verdict").get<std::string>());
  evidence.required = entry.value("required", false);
  evidence.detail = entry.value("detail", std::string());
  if (entry.contains("reject_step")) evidence.reject_step = entry.at("reject_step").get<int>();
  return evidence;
}

json signatureToJson(const ViolationSignature& signature) {
  json entry;
  entry["version_ids"] = signature.version_ids;
  std::vector<bool> exhibits(signature.exhibits.begin(), signature.exhibits.end());
  entry["exhibits"] = exhibits;
  if (signature.culprit_revision) entry["culprit_revision"] = *signature.culprit_revision;
  if (!signature.annotations.empty()) entry["annotations"] = signature.annotations;
  return entry;
}

ViolationSignature signatureFromJson(const json& entry) {
  ViolationSignature signature;
  for (const auto& id : entry.at("version_ids")) {
    signature.version_ids.push_back(id.get<std::string>());
  }
  for (const auto& bit : entry.at("exhibits")) {
    signature.exhibits.push_back(bit.get<bool>() ? 1 : 0);
  }
  if (entry.contains("culprit_revision")) {
    signature.culprit_revision = entry.at("culprit_revision").get<std::string>();
  }
  if (entry.contains("annotations")) {
    for (const auto& note : entry.at("annotations")) {
      signature.annotations.push_back(note.get<std::string>());
    }
  }
  return signature;
}

const CompileOutcome* findOutcome(const std::vector<CompileOutcome>& outcomes,
                                  const std::string& compiler_id, const std::string& flag) {
  for (const auto& outcome : outcomes) {
    if (outcome.compiler_id == compiler_id && outcome.opt_flag == flag) return &outcome;
  }
  return nullptr;
}

std::string renderCompileCommand(const CompilerSpec& spec, const std::string& flag,
                                 const std::string& input, const std::string& output) {
  std::string flags = flag;
  if (!spec.other_flags.empty()) flags += " " + spec.other_flags;
  return substitutePlaceholders(
      spec.invocation, {{"input", input}, {"output", output}, {"flags", flags}});
}

const CompilerSpec* findCompiler(const std::vector<CompilerSpec>& compilers,
                                 const std::string& id) {
  for (const auto& spec : compilers) {
    if (spec.id == id) return &spec;
  }
  return nullptr;
}

}  // namespace

ReportPaths emitReport(const Violation& violation,
                       const std::vector<CompileOutcome>& step_outcomes,
                       const std::vector<CompileOutcome>& baseline_outcomes,
                       const CampaignConfig& config, const fs::path& dir,
                       const std::string& name) {
  fs::create_directories(dir);
  const ViolationCandidate& candidate = violation.candidate;
  const std::string& ext = config.profile.source_extension;

  std::string mutant_name = name + "-mutant" + ext;
  std::string seed_name = name + "-seed" + ext;

  json doc;
  doc["schema_version"] = 1;
  doc["tool"] = "sizeprobe";
  doc["language"] = config.language;
  doc["strategy"] = toString(candidate.strategy);
  doc["metric"] = toString(config.metric.metric);
  doc["source"] = candidate.program.code;
  doc["seed_source"] = config.profile.seed_code;
  doc["step_index"] = candidate.program.step_index;
  doc["lineage"] = candidate.program.lineage;

  json compilers = json::array();
  for (const auto& spec : config.compilers) compilers.push_back(compilerToJson(spec));
  doc["compilers"] = compilers;

  json sizes = json::array();
  for (const auto& outcome : baseline_outcomes) {
    if (!outcome.success || !outcome.size) continue;
    json entry = sizeRefToJson({outcome.compiler_id, outcome.opt_flag, outcome.size->value});
    entry["step"] = 0;
    sizes.push_back(entry);
  }
  for (const auto& outcome : step_outcomes) {
    if (!outcome.success || !outcome.size) continue;
    json entry = sizeRefToJson({outcome.compiler_id, outcome.opt_flag, outcome.size->value});
    entry["step"] = candidate.program.step_index;
    sizes.push_back(entry);
  }
  doc["sizes"] = sizes;

  json trigger;
  trigger["offender"] = sizeRefToJson(candidate.offender);
  trigger["baseline"] = sizeRefToJson(candidate.baseline);
  trigger["threshold"] = json{{"num", candidate.threshold.num}, {"den", candidate.threshold.den}};
  trigger["ratio"] = json{{"num", candidate.ratio.num}, {"den", candidate.ratio.den}};
  trigger["percent_delta"] = candidate.ratio.percentDelta();
  trigger["inequality"] = candidate.inequality;
  doc["trigger"] = trigger;

  json evidence = json::array();
  for (const auto& e : violation.filter_evidence) evidence.push_back(evidenceToJson(e));
  doc["filter_evidence"] = evidence;

  if (violation.signature) doc["signature"] = signatureToJson(*violation.signature);

  // Assembly of the two compared compiles, attached for triage.
  {
    json assembly;
    const CompileOutcome* offender = findOutcome(step_outcomes, candidate.offender.compiler_id,
                                                 candidate.offender.opt_flag);
    const CompileOutcome* baseline =
        candidate.strategy == Strategy::DeadCode
            ? findOutcome(baseline_outcomes, candidate.baseline.compiler_id,
                          candidate.baseline.opt_flag)
            : findOutcome(step_outcomes, candidate.baseline.compiler_id,
                          candidate.baseline.opt_flag);
    if (offender != nullptr) assembly["offender"] = offender->assembly;
    if (baseline != nullptr) assembly["baseline"] = baseline->assembly;
    if (!assembly.empty()) doc["assembly"] = assembly;
  }

  std::string script;
  {
    std::ostringstream out;
    out << "#!/bin/sh\n";
    out << "# " << candidate.inequality << "\n";
    out << "set -e\n";
    out << "cd \"$(dirname \"$0\")\"\n";
    int index = 0;
    if (candidate.strategy == Strategy::DeadCode) {
      for (const auto& outcome : baseline_outcomes) {
        const CompilerSpec* spec = findCompiler(config.compilers, outcome.compiler_id);
        if (spec == nullptr) continue;
        out << renderCompileCommand(*spec, outcome.opt_flag, seed_name,
                                    "out-seed-" + std::to_string(index++) + ".s")
            << "\n";
      }
    }
    index = 0;
    for (const auto& outcome : step_outcomes) {
      const CompilerSpec* spec = findCompiler(config.compilers, outcome.compiler_id);
      if (spec == nullptr) continue;
      out << renderCompileCommand(*spec, outcome.opt_flag, mutant_name,
                                  "out-" + std::to_string(index++) + ".s")
          << "\n";
    }
    script = out.str();
  }
  doc["repro_script"] = script;

  ReportPaths paths;
  paths.json = dir / (name + ".json");
  paths.script = dir / (name + ".sh");
  paths.mutant_source = dir / mutant_name;
  paths.seed_source = dir / seed_name;

  writeText(paths.json, doc.dump(2) + "\n");
  writeText(paths.script, script);
  ::chmod(paths.script.c_str(), 0755);
  writeText(paths.mutant_source, candidate.program.code + "\n");
  writeText(paths.seed_source, config.profile.seed_code + "\n");
  return paths;
}

ReportData parseReportFile(const fs::path& path) {
  json doc;
  try {
    doc = json::parse(readText(path));
  } catch (const json::exception& e) {
    throw Error(Errc::IoError, "report '" + path.string() + "': invalid JSON: " + e.what());
  }
  ReportData report;
  try {
    report.schema_version = doc.value("schema_version", 1);
    report.language = doc.at("language").get<std::string>();
    report.strategy = strategyFromString(doc.at("strategy").get<std::string>());
    report.metric = metricFromString(doc.value("metric", std::string("instruction_count")));
    report.source = doc.at("source").get<std::string>();
    report.seed_source = doc.value("seed_source", std::string());
    report.step_index = doc.value("step_index", 0);
    if (doc.contains("lineage")) {
      for (const auto& id : doc.at("lineage")) {
        report.lineage.push_back(id.get<std::string>());
      }
    }
    if (doc.contains("compilers")) {
      for (const auto& entry : doc.at("compilers")) {
        report.compilers.push_back(compilerFromJson(entry));
      }
    }
    if (doc.contains("sizes")) {
      for (const auto& entry : doc.at("sizes")) {
        ReportSize size;
        size.compiler_id = entry.at("compiler_id").get<std::string>();
        size.opt_flag = entry.at("opt_flag").get<std::string>();
        size.size = entry.at("size").get<long long>();
        size.step = entry.value("step", 0);
        report.sizes.push_back(size);
      }
    }
    const json& trigger = doc.at("trigger");
    report.trigger.strategy = report.strategy;
    report.trigger.offender = sizeRefFromJson(trigger.at("offender"));
    report.trigger.baseline = sizeRefFromJson(trigger.at("baseline"));
    report.trigger.threshold = Fraction{trigger.at("threshold").at("num").get<long long>(),
                                        trigger.at("threshold").at("den").get<long long>()};
    report.trigger.ratio = Ratio{trigger.at("ratio").at("num").get<long long>(),
                                 trigger.at("ratio").at("den").get<long long>()};
    report.trigger.inequality = trigger.value("inequality", std::string());
    report.trigger.program.language = report.language;
    report.trigger.program.code = report.source;
    report.trigger.program.step_index = report.step_index;
    report.trigger.program.lineage = report.lineage;
    if (doc.contains("filter_evidence")) {
      for (const auto& entry : doc.at("filter_evidence")) {
        report.filter_evidence.push_back(evidenceFromJson(entry));
      }
    }
    if (doc.contains("signature")) {
      report.signature = signatureFromJson(doc.at("signature"));
    }
    report.repro_script = doc.value("repro_script", std::string());
  } catch (const json::exception& e) {
    throw Error(Errc::IoError, "report '" + path.string() + "': " + e.what());
  }
  return report;
}

void updateReportSignature(const fs::path& path, const ViolationSignature& signature) {
  json doc = json::parse(readText(path));
  doc["signature"] = signatureToJson(signature);
  writeText(path, doc.dump(2) + "\n");
}

ExhibitResult rerunCheckWithCompiler(const ReportData& report, const CompilerSpec& substitute,
                                     const fs::path& scratch_dir) {
  ExhibitResult result;
  const LanguageProfile& profile = profileFor(report.language);
  MetricConfig metric;  // reruns use the instruction-count metric

  SourceProgram mutant;
  mutant.language = report.language;
  mutant.code = report.source;
  mutant.step_index = report.step_index;

  auto compileWith = [&](const CompilerSpec& spec, const std::string& flag,
                         const SourceProgram& program,
                         const std::string& tag) -> std::optional<CompileOutcome> {
    CompileOutcome outcome = compileToAsm(spec, flag, program, profile,
                                          scratch_dir / tag, 30.0, metric);
    if (!outcome.success || !outcome.size) return std::nullopt;
    return outcome;
  };

  try {
    switch (report.strategy) {
      case Strategy::DeadCode: {
        SourceProgram seed;
        seed.language = report.language;
        seed.code = report.seed_source;
        auto step = compileWith(substitute, report.trigger.offender.opt_flag, mutant, "step");
        auto base = compileWith(substitute, report.trigger.baseline.opt_flag, seed, "seed");
        if (!step || !base) {
          result.compiled = false;
          result.note = "compile failure";
          return result;
        }
        result.triggered = deadCodeCheck(*step, *base, mutant).has_value();
        result.note = std::to_string(step->size->value) + " vs seed " +
                      std::to_string(base->size->value);
        return result;
      }
      case Strategy::Pipeline: {
        // Re-drive the pipeline comparison over the flags the report
        // recorded for the offender compiler.
        std::vector<std::string> flags;
        for (const auto& size : report.sizes) {
          if (size.step == report.step_index &&
              size.compiler_id == report.trigger.offender.compiler_id &&
              std::find(flags.begin(), flags.end(), size.opt_flag) == flags.end()) {
            flags.push_back(size.opt_flag);
          }
        }
        std::vector<CompileOutcome> outcomes;
        for (std::size_t i = 0; i < flags.size(); ++i) {
          auto outcome = compileWith(substitute, flags[i], mutant, "flag" + std::to_string(i));
          if (!outcome) {
            result.compiled = false;
            result.note = "compile failure at " + flags[i];
            return result;
          }
          outcomes.push_back(*outcome);
        }
        auto candidate = pipelineCheck(outcomes, report.trigger.offender.opt_flag,
                                       report.trigger.threshold, mutant);
        result.triggered = candidate.has_value();
        if (candidate) result.note = candidate->inequality;
        return result;
      }
      case Strategy::SingleCompiler:
      case Strategy::MultiCompiler: {
        const CompilerSpec* baseline_spec =
            findCompiler(report.compilers, report.trigger.baseline.compiler_id);
        if (baseline_spec == nullptr) {
          result.compiled = false;
          result.note = "baseline compiler missing from report";
          return result;
        }
        auto offender =
            compileWith(substitute, report.trigger.offender.opt_flag, mutant, "offender");
        auto baseline =
            compileWith(*baseline_spec, report.trigger.baseline.opt_flag, mutant, "baseline");
        if (!offender || !baseline) {
          result.compiled = false;
          result.note = "compile failure";
          return result;
        }
        long long base_size = baseline->size->value;
        result.triggered = base_size > 0 && thresholdExceeded(offender->size->value, base_size,
                                                              report.trigger.threshold);
        result.note = std::to_string(offender->size->value) + " vs " +
                      std::to_string(base_size);
        return result;
      }
    }
  } catch (const Error& e) {
    if (e.code() == Errc::ToolchainMissing) {
      result.compiled = false;
      result.note = e.what();
      return result;
    }
    throw;
  }
  result.compiled = false;
  result.note = "unknown strategy";
  return result;
}

VerifyResult verifyReport(const ReportData& report, const fs::path& scratch_dir,
                          bool recompile) {
  VerifyResult result;
  try {
    result.arithmetic_ok = candidateRecheck(report.trigger);
  } catch (const Error&) {
    result.arithmetic_ok = false;
  }

  std::string detail =
      std::string("stored inequality ") + (result.arithmetic_ok ? "holds" : "DOES NOT hold");

  if (recompile) {
    const CompilerSpec* offender =
        findCompiler(report.compilers, report.trigger.offender.compiler_id);
    if (offender == nullptr) {
      detail += "; offender compiler spec missing, recompile skipped";
    } else {
      std::string argv0;
      auto tokens = splitCommand(substitutePlaceholders(
          offender->invocation, {{"input", "x"}, {"output", "y"}, {"flags", ""}}));
      if (!tokens.empty()) argv0 = tokens.front();
      if (!binaryExists(argv0)) {
        detail += "; compiler '" + argv0 + "' not found locally, recompile skipped";
      } else {
        ExhibitResult rerun = rerunCheckWithCompiler(report, *offender, scratch_dir);
        if (!rerun.compiled) {
          detail += "; recompile failed (" + rerun.note + ")";
        } else {
          result.recompiled_trigger = rerun.triggered;
          detail += std::string("; recompiled check ") +
                    (rerun.triggered ? "triggers" : "does not trigger") +
                    (rerun.note.empty() ? "" : " (" + rerun.note + ")");
        }
      }
    }
  }

  result.decision_matches =
      result.arithmetic_ok &&
      (!result.recompiled_trigger.has_value() || *result.recompiled_trigger);
  result.detail = detail;
  return result;
}

std::vector<CorpusEntry> loadCorpusManifest(const fs::path& path) {
  json doc;
  try {
    doc = json::parse(readText(path));
  } catch (const json::exception& e) {
    throw Error(Errc::IoError, "corpus manifest: " + std::string(e.what()));
  }
  std::vector<CorpusEntry> entries;
  for (const auto& item : doc.at("entries")) {
    CorpusEntry entry;
    entry.file = item.at("file").get<std::string>();
    entry.language = item.at("language").get<std::string>();
    entry.strategy = strategyFromString(item.at("strategy").get<std::string>());
    entry.note = item.value("note", std::string());
    entry.compiler_hint = item.value("compiler", std::string());
    entries.push_back(entry);
  }
  return entries;
}

std::vector<CorpusResult> checkCorpus(
    const std::vector<CorpusEntry>& entries, const fs::path& corpus_dir,
    const std::map<std::string, std::vector<CompilerSpec>>& matrices,
    const StrategyConfig& strategy_defaults, const fs::path& scratch_dir) {
  std::vector<CorpusResult> results;
  int index = 0;
  for (const auto& entry : entries) {
    CorpusResult result;
    result.entry = entry;
    fs::path scratch = scratch_dir / ("corpus-" + std::to_string(index++));

    auto matrix_it = matrices.find(entry.language);
    if (matrix_it == matrices.end()) {
      result.detail = "no compiler matrix for language '" + entry.language + "'";
      results.push_back(result);
      continue;
    }
    const LanguageProfile* profile = nullptr;
    try {
      profile = &profileFor(entry.language);
    } catch (const Error& e) {
      result.detail = e.what();
      results.push_back(result);
      continue;
    }

    StrategyConfig strategy = strategy_defaults;
    strategy.strategy = entry.strategy;
    std::vector<CompilerSpec> matrix = matrix_it->second;
    if (!entry.compiler_hint.empty()) {
      auto hinted = std::find_if(matrix.begin(), matrix.end(), [&](const CompilerSpec& s) {
        return s.id == entry.compiler_hint;
      });
      if (hinted != matrix.end()) std::rotate(matrix.begin(), hinted, hinted + 1);
    }
    auto compile_set = strategyCompileSet(entry.strategy, matrix);
    if (compile_set.empty()) {
      result.detail = "strategy needs more compilers than the matrix provides";
      results.push_back(result);
      continue;
    }

    bool tool_missing = false;
    for (const auto& [spec, flag] : compile_set) {
      auto tokens = splitCommand(substitutePlaceholders(
          spec.invocation, {{"input", "x"}, {"output", "y"}, {"flags", flag}}));
      if (tokens.empty() || !binaryExists(tokens.front())) {
        result.detail = "compiler '" + (tokens.empty() ? spec.id : tokens.front()) +
                        "' not found locally";
        tool_missing = true;
        break;
      }
    }
    if (tool_missing) {
      results.push_back(result);
      continue;
    }

    SourceProgram program;
    program.language = entry.language;
    program.step_index = 1;
    try {
      program.code = readText(corpus_dir / entry.file);
    } catch (const Error& e) {
      result.detail = e.what();
      results.push_back(result);
      continue;
    }

    SourceProgram seed;
    seed.language = entry.language;
    seed.code = profile->seed_code;

    std::vector<CompileOutcome> step_outcomes;
    std::vector<CompileOutcome> baseline_outcomes;
    bool compile_failure = false;
    int sub = 0;
    for (const auto& [spec, flag] : compile_set) {
      CompileOutcome outcome = compileToAsm(spec, flag, program, *profile,
                                            scratch / ("c" + std::to_string(sub)), 30.0);
      if (!outcome.success) {
        result.detail = "does not compile with " + spec.id + " at " + flag;
        compile_failure = true;
        break;
      }
      step_outcomes.push_back(outcome);
      if (entry.strategy == Strategy::DeadCode) {
        CompileOutcome base = compileToAsm(spec, flag, seed, *profile,
                                           scratch / ("s" + std::to_string(sub)), 30.0);
        if (!base.success) {
          result.detail = "seed does not compile with " + spec.id;
          compile_failure = true;
          break;
        }
        baseline_outcomes.push_back(base);
      }
      ++sub;
    }
    if (compile_failure) {
      results.push_back(result);
      continue;
    }

    std::vector<CompilerSpec> matrix_specs =
        (entry.strategy == Strategy::SingleCompiler ||
         entry.strategy == Strategy::MultiCompiler)
            ? matrix
            : std::vector<CompilerSpec>{matrix.front()};
    std::optional<ViolationCandidate> candidate = evaluateStrategy(
        strategy, matrix_specs, step_outcomes, baseline_outcomes, program);
    if (candidate) {
      result.status = CorpusResult::Status::Trigger;
      result.detail = candidate->inequality;
    } else {
      result.status = CorpusResult::Status::NoTrigger;
      std::string sizes;
      for (const auto& outcome : step_outcomes) {
        if (!sizes.empty()) sizes += ", ";
        sizes += outcome.compiler_id + " " + outcome.opt_flag + ": " +
                 std::to_string(outcome.size ? outcome.size->value : -1);
      }
      result.detail = sizes;
    }
    results.push_back(result);
  }
  return results;
}

}  // namespace sizeprobe
