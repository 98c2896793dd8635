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

#ifndef SIZEPROBE_CATALOG_HPP_
#define SIZEPROBE_CATALOG_HPP_

#include <string>
#include <vector>

#include "sizeprobe/core.hpp"

namespace sizeprobe {

// The built-in mutation instruction list: 15 entries across control flow,
// conditionals, aggregates/pointers and function arguments. User catalogs
// loaded from file replace it wholesale.
std::vector<MutationInstruction> defaultCatalog();

// Ids of the built-in instructions that describe non-executed code. The
// loader cross-checks every catalog's deadness flags against this list.
const std::vector<std::string>& deadInstructionAllowlist();

// Parses a catalog from JSON text (a list of {id, category, text, deadness,
// per_language_text} records) and validates it. Throws Error(ConfigError) on
// malformed entries or deadness flags inconsistent with the allowlist.
std::vector<MutationInstruction> parseCatalog(const std::string& json_text);

std::vector<MutationInstruction> loadCatalogFile(const std::string& path);

// Validation shared by the default and file paths: non-empty single-line
// texts, unique ids, deadness consistent with the allowlist (custom entries
// marked dead must at least say so in their text).
void validateCatalog(const std::vector<MutationInstruction>& catalog);

std::string catalogToJson(const std::vector<MutationInstruction>& catalog);

}  // namespace sizeprobe

#endif  // SIZEPROBE_CATALOG_HPP_
