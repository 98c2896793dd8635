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

#include "sizeprobe/core.hpp"

#include <cmath>
#include <cstdio>
#include <numeric>

namespace sizeprobe {

const char* errcName(Errc code) {
  switch (code) {
    case Errc::UnknownLanguage: return "UnknownLanguage";
    case Errc::NoEligibleInstruction: return "NoEligibleInstruction";
    case Errc::ProviderTimeout: return "ProviderTimeout";
    case Errc::ProviderUnavailable: return "ProviderUnavailable";
    case Errc::ExtractionFailed: return "ExtractionFailed";
    case Errc::ToolchainMissing: return "ToolchainMissing";
    case Errc::CompileTimeout: return "CompileTimeout";
    case Errc::SignatureCorrupted: return "SignatureCorrupted";
    case Errc::DegenerateBaseline: return "DegenerateBaseline";
    case Errc::NotBisectable: return "NotBisectable";
    case Errc::ConfigError: return "ConfigError";
    case Errc::IoError: return "IoError";
  }
  return "UnknownError";
}

Fraction Fraction::fromDecimal(double value) {
  constexpr long long kScale = 1000000;
  long long num = std::llround(value * static_cast<double>(kScale));
  long long den = kScale;
  long long g = std::gcd(num < 0 ? -num : num, den);
  if (g > 1) {
    num /= g;
    den /= g;
  }
  return Fraction{num, den};
}

std::string Ratio::percentDelta() const {
  if (den == 0) return "n/a";
  // Growth in tenths of a percent, rounded half up.
  long long tenths = ((num - den) * 1000 + den / 2) / den;
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%+lld.%lld%%", tenths / 10,
                tenths < 0 ? (-tenths) % 10 : tenths % 10);
  return buf;
}

bool thresholdExceeded(long long offender_size, long long baseline_size,
                       const Fraction& threshold) {
  if (baseline_size == 0) {
    throw Error(Errc::DegenerateBaseline,
                "baseline size is zero; relative comparison is meaningless");
  }
  // offender > baseline * (1 + num/den)  <=>  offender*den > baseline*(den+num)
  return offender_size * threshold.den > baseline_size * (threshold.den + threshold.num);
}

std::string contentDigest(const std::string& text) {
  std::uint64_t hash = 1469598103934665603ULL;
  for (unsigned char c : text) {
    hash ^= c;
    hash *= 1099511628211ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(hash));
  return buf;
}

const char* toString(InstructionCategory category) {
  switch (category) {
    case InstructionCategory::ControlFlow: return "control_flow";
    case InstructionCategory::Conditionals: return "conditionals";
    case InstructionCategory::AggregatesPointers: return "aggregates_pointers";
    case InstructionCategory::FunctionArguments: return "function_arguments";
  }
  return "unknown";
}

const char* toString(Deadness deadness) {
  return deadness == Deadness::Dead ? "dead" : "live";
}

const char* toString(Channel channel) {
  return channel == Channel::Trunk ? "trunk" : "release";
}

const char* toString(SizeMetric metric) {
  return metric == SizeMetric::TextSectionBytes ? "text_section_bytes" : "instruction_count";
}

const char* toString(Strategy strategy) {
  switch (strategy) {
    case Strategy::DeadCode: return "dead_code";
    case Strategy::Pipeline: return "pipeline";
    case Strategy::SingleCompiler: return "single_compiler";
    case Strategy::MultiCompiler: return "multi_compiler";
  }
  return "unknown";
}

const char* toString(FilterVerdict verdict) {
  switch (verdict) {
    case FilterVerdict::Pass: return "pass";
    case FilterVerdict::Reject: return "reject";
    case FilterVerdict::Skipped: return "skipped";
  }
  return "unknown";
}

namespace {

[[noreturn]] void badName(const char* what, const std::string& name) {
  throw Error(Errc::ConfigError, std::string(what) + ": unknown value '" + name + "'");
}

}  // namespace

InstructionCategory categoryFromString(const std::string& name) {
  if (name == "control_flow") return InstructionCategory::ControlFlow;
  if (name == "conditionals") return InstructionCategory::Conditionals;
  if (name == "aggregates_pointers") return InstructionCategory::AggregatesPointers;
  if (name == "function_arguments") return InstructionCategory::FunctionArguments;
  badName("category", name);
}

Deadness deadnessFromString(const std::string& name) {
  if (name == "dead") return Deadness::Dead;
  if (name == "live") return Deadness::Live;
  badName("deadness", name);
}

Channel channelFromString(const std::string& name) {
  if (name == "release") return Channel::Release;
  if (name == "trunk") return Channel::Trunk;
  badName("channel", name);
}

SizeMetric metricFromString(const std::string& name) {
  if (name == "instruction_count") return SizeMetric::InstructionCount;
  if (name == "text_section_bytes") return SizeMetric::TextSectionBytes;
  badName("metric", name);
}

Strategy strategyFromString(const std::string& name) {
  if (name == "dead_code") return Strategy::DeadCode;
  if (name == "pipeline") return Strategy::Pipeline;
  if (name == "single_compiler") return Strategy::SingleCompiler;
  if (name == "multi_compiler") return Strategy::MultiCompiler;
  badName("strategy", name);
}

FilterVerdict filterVerdictFromString(const std::string& name) {
  if (name == "pass") return FilterVerdict::Pass;
  if (name == "reject") return FilterVerdict::Reject;
  if (name == "skipped") return FilterVerdict::Skipped;
  badName("filter verdict", name);
}

}  // namespace sizeprobe
