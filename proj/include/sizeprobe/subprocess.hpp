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

#ifndef SIZEPROBE_SUBPROCESS_HPP_
#define SIZEPROBE_SUBPROCESS_HPP_

#include <map>
#include <string>
#include <vector>

namespace sizeprobe {

struct RunResult {
  int exit_code = -1;
  bool timed_out = false;
  bool spawn_failed = false;  // argv[0] could not be executed
  std::string out;
  std::string err;
  double wall_seconds = 0.0;
};

// Runs argv directly (no shell), captures stdout/stderr, and kills the whole
// process group on timeout. cwd empty means inherit.
RunResult runCommand(const std::vector<std::string>& argv, double timeout_seconds,
                     const std::string& cwd = "");

// Whitespace-splits a rendered command template into argv tokens.
std::vector<std::string> splitCommand(const std::string& command);

// Replaces each "{key}" with its value; unknown placeholders are left as-is.
std::string substitutePlaceholders(const std::string& templ,
                                   const std::map<std::string, std::string>& values);

// PATH resolution for an argv[0]; returns false when the binary cannot be
// found or is not executable.
bool binaryExists(const std::string& name);

}  // namespace sizeprobe

#endif  // SIZEPROBE_SUBPROCESS_HPP_
