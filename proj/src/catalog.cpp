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

#include "sizeprobe/catalog.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <set>
#include <sstream>

#include "json.hpp"

namespace sizeprobe {

namespace {

using nlohmann::json;

MutationInstruction make(const char* id, InstructionCategory cat, const char* text,
                         Deadness deadness) {
  MutationInstruction ins;
  ins.id = id;
  ins.category = cat;
  ins.text = text;
  ins.deadness = deadness;
  return ins;
}

bool containsWordDead(const std::string& text) {
  for (std::size_t pos = text.find("dead"); pos != std::string::npos;
       pos = text.find("dead", pos + 1)) {
    bool left_ok = pos == 0 || !std::isalnum(static_cast<unsigned char>(text[pos - 1]));
    std::size_t end = pos + 4;
    bool right_ok = end >= text.size() || !std::isalnum(static_cast<unsigned char>(text[end]));
    if (left_ok && right_ok) return true;
  }
  return false;
}

}  // namespace

std::vector<MutationInstruction> defaultCatalog() {
  using IC = InstructionCategory;
  std::vector<MutationInstruction> catalog = {
      make("if-stmt", IC::ControlFlow,
           "add a conditional statement with a statement inside", Deadness::Live),
      make("nested-if-stmt", IC::ControlFlow,
           "add a nested conditional statement with a non trivial condition and a "
           "statement inside",
           Deadness::Live),
      make("dead-if-stmt", IC::ControlFlow,
           "add a dead conditional statement with a statement inside", Deadness::Dead),
      make("dead-nested-if-stmt", IC::ControlFlow,
           "add a dead nested conditional statement with a non trivial condition and "
           "a statement inside",
           Deadness::Dead),
      make("loop", IC::ControlFlow,
           "add a loop with a complex condition and statement inside", Deadness::Live),
      make("dead-loop", IC::ControlFlow,
           "add a dead loop with a complex condition and statement inside",
           Deadness::Dead),
      make("nested-loop", IC::ControlFlow,
           "add a nested loop with a complex condition and a statement inside",
           Deadness::Live),
      make("dead-nested-loop", IC::ControlFlow,
           "add a dead nested loop with a complex condition and a statement inside",
           Deadness::Dead),
      make("complicate-condition", IC::Conditionals, "make a condition more complicated",
           Deadness::Live),
      make("complicate-dead-condition", IC::Conditionals,
           "make a dead condition more complicated", Deadness::Dead),
      make("array-code", IC::AggregatesPointers, "add array code", Deadness::Live),
      make("pointer-code", IC::AggregatesPointers, "add pointers code", Deadness::Live),
      make("struct-code", IC::AggregatesPointers, "add struct code usage", Deadness::Live),
      make("union-code", IC::AggregatesPointers, "add union code usage", Deadness::Live),
      make("add-function-args", IC::FunctionArguments,
           "add function arguments to a function that already exists, no default "
           "arguments",
           Deadness::Live),
  };
  // Languages without C-style unions get the enumeration phrasing instead.
  for (auto& ins : catalog) {
    if (ins.id == "union-code") {
      ins.per_language_text["swift"] = "add enumeration code usage";
    }
  }
  return catalog;
}

const std::vector<std::string>& deadInstructionAllowlist() {
  static const std::vector<std::string> kAllowlist = {
      "dead-if-stmt", "dead-nested-if-stmt", "dead-loop", "dead-nested-loop",
      "complicate-dead-condition",
  };
  return kAllowlist;
}

void validateCatalog(const std::vector<MutationInstruction>& catalog) {
  if (catalog.empty()) {
    throw Error(Errc::ConfigError, "catalog: empty instruction list");
  }
  const auto& allowlist = deadInstructionAllowlist();
  std::set<std::string> default_ids;
  for (const auto& ins : defaultCatalog()) default_ids.insert(ins.id);

  std::set<std::string> seen;
  for (const auto& ins : catalog) {
    if (ins.id.empty()) {
      throw Error(Errc::ConfigError, "catalog: instruction with empty id");
    }
    if (!seen.insert(ins.id).second) {
      throw Error(Errc::ConfigError, "catalog: duplicate instruction id '" + ins.id + "'");
    }
    if (ins.text.empty() || ins.text.find('\n') != std::string::npos) {
      throw Error(Errc::ConfigError,
                  "catalog: instruction '" + ins.id + "' text must be non-empty and single-line");
    }
    for (const auto& [lang, text] : ins.per_language_text) {
      if (text.empty() || text.find('\n') != std::string::npos) {
        throw Error(Errc::ConfigError, "catalog: per-language text for '" + ins.id + "' (" +
                                           lang + ") must be non-empty and single-line");
      }
    }
    bool allowlisted =
        std::find(allowlist.begin(), allowlist.end(), ins.id) != allowlist.end();
    bool is_dead = ins.deadness == Deadness::Dead;
    if (default_ids.count(ins.id)) {
      if (allowlisted != is_dead) {
        throw Error(Errc::ConfigError, "catalog: instruction '" + ins.id +
                                           "' deadness flag contradicts the dead-instruction "
                                           "allowlist");
      }
    } else if (is_dead && !containsWordDead(ins.text)) {
      throw Error(Errc::ConfigError,
                  "catalog: custom instruction '" + ins.id +
                      "' is marked dead but its text does not describe dead code");
    }
  }
}

std::vector<MutationInstruction> parseCatalog(const std::string& json_text) {
  json doc;
  try {
    doc = json::parse(json_text);
  } catch (const json::exception& e) {
    throw Error(Errc::ConfigError, std::string("catalog: invalid JSON: ") + e.what());
  }
  if (!doc.is_array()) {
    throw Error(Errc::ConfigError, "catalog: top-level value must be a list");
  }
  std::vector<MutationInstruction> catalog;
  for (const auto& entry : doc) {
    MutationInstruction ins;
    try {
      ins.id = entry.at("id").get<std::string>();
      ins.category = categoryFromString(entry.at("category").get<std::string>());
      ins.text = entry.at("text").get<std::string>();
      ins.deadness = deadnessFromString(entry.at("deadness").get<std::string>());
      if (entry.contains("per_language_text")) {
        for (const auto& [lang, text] : entry.at("per_language_text").items()) {
          ins.per_language_text[lang] = text.get<std::string>();
        }
      }
    } catch (const json::exception& e) {
      throw Error(Errc::ConfigError, std::string("catalog: malformed entry: ") + e.what());
    }
    catalog.push_back(std::move(ins));
  }
  validateCatalog(catalog);
  return catalog;
}

std::vector<MutationInstruction> loadCatalogFile(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    throw Error(Errc::ConfigError, "catalog: cannot open '" + path + "'");
  }
  std::ostringstream buf;
  buf << in.rdbuf();
  return parseCatalog(buf.str());
}

std::string catalogToJson(const std::vector<MutationInstruction>& catalog) {
  json doc = json::array();
  for (const auto& ins : catalog) {
    json entry;
    entry["id"] = ins.id;
    entry["category"] = toString(ins.category);
    entry["text"] = ins.text;
    entry["deadness"] = toString(ins.deadness);
    if (!ins.per_language_text.empty()) {
      entry["per_language_text"] = ins.per_language_text;
    }
    doc.push_back(entry);
  }
  return doc.dump(2) + "\n";
}

}  // namespace sizeprobe
