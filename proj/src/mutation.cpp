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

#include "sizeprobe/mutation.hpp"

#include <algorithm>
#include <cctype>
#include <chrono>
#include <sstream>
#include <thread>

#include "httplib.h"
#include "json.hpp"

#include "sizeprobe/profile.hpp"

namespace sizeprobe {

using nlohmann::json;

SourceProgram seedFor(const std::string& language_id) {
  const LanguageProfile& profile = profileFor(language_id);
  SourceProgram program;
  program.language = profile.id;
  program.code = profile.seed_code;
  program.step_index = 0;
  return program;
}

const MutationInstruction& sampleInstruction(Strategy strategy, Rng& rng,
                                             const std::vector<MutationInstruction>& catalog,
                                             const std::string& current_code,
                                             const LanguageProfile& profile) {
  bool has_control_flow = codeHasControlFlow(current_code, profile);
  std::vector<const MutationInstruction*> eligible;
  for (const auto& instruction : catalog) {
    if (strategy == Strategy::DeadCode && instruction.deadness != Deadness::Dead) continue;
    if (instruction.category == InstructionCategory::Conditionals && !has_control_flow)
      continue;
    eligible.push_back(&instruction);
  }
  if (eligible.empty()) {
    throw Error(Errc::NoEligibleInstruction,
                "no instruction is eligible for strategy " +
                    std::string(toString(strategy)));
  }
  return *eligible[rng.bounded(eligible.size())];
}

PromptRequest buildPrompt(const LanguageProfile& profile,
                          const MutationInstruction& instruction, const std::string& code) {
  if (code.empty()) {
    throw Error(Errc::ConfigError, "buildPrompt: empty code");
  }
  PromptRequest request;
  request.language = profile.id;
  request.instruction = instruction;
  request.code = code;
  request.rendered_prompt = "Given the following " + profile.display_name +
                            " program, please " + instruction.textFor(profile.id) +
                            ":\n\n" + code;
  return request;
}

// ---------------------------------------------------------------------------
// Code extraction
// ---------------------------------------------------------------------------

namespace {

std::vector<std::string> splitLines(const std::string& text) {
  std::vector<std::string> lines;
  std::string line;
  std::istringstream in(text);
  while (std::getline(in, line)) lines.push_back(line);
  return lines;
}

std::string joinLines(const std::vector<std::string>& lines, std::size_t first,
                      std::size_t last_exclusive) {
  std::string out;
  for (std::size_t i = first; i < last_exclusive; ++i) {
    out += lines[i];
    if (i + 1 < last_exclusive) out += '\n';
  }
  return out;
}

bool isBlank(const std::string& line) {
  return std::all_of(line.begin(), line.end(),
                     [](unsigned char c) { return std::isspace(c); });
}

bool isFenceLine(const std::string& line) {
  std::size_t i = 0;
  while (i < line.size() && std::isspace(static_cast<unsigned char>(line[i]))) ++i;
  return line.compare(i, 3, "```") == 0;
}

// Prose detector: response lines with none of the characters that program
// text in the supported languages reliably carries.
bool looksLikeCode(const std::string& line) {
  if (isBlank(line)) return false;
  return line.find_first_of(";{}()=#[]<>*&/") != std::string::npos;
}

bool containsSymbolUse(const std::string& text, const std::string& symbol) {
  auto is_ident = [](char c) {
    return std::isalnum(static_cast<unsigned char>(c)) || c == '_';
  };
  for (std::size_t pos = text.find(symbol); pos != std::string::npos;
       pos = text.find(symbol, pos + 1)) {
    bool left_ok = pos == 0 || !is_ident(text[pos - 1]);
    std::size_t after = pos + symbol.size();
    while (after < text.size() &&
           std::isspace(static_cast<unsigned char>(text[after]))) {
      ++after;
    }
    if (left_ok && after < text.size() && text[after] == '(') return true;
  }
  return false;
}

std::string trimBlankEdges(std::vector<std::string> lines) {
  std::size_t first = 0;
  std::size_t last = lines.size();
  while (first < last && isBlank(lines[first])) ++first;
  while (last > first && isBlank(lines[last - 1])) --last;
  return joinLines(lines, first, last);
}

}  // namespace

std::string extractCode(const std::string& raw_response, const LanguageProfile& profile) {
  std::vector<std::string> lines = splitLines(raw_response);

  for (std::size_t i = 0; i < lines.size(); ++i) {
    if (!isFenceLine(lines[i])) continue;
    std::size_t close = i + 1;
    while (close < lines.size() && !isFenceLine(lines[close])) ++close;
    std::string content = trimBlankEdges(
        std::vector<std::string>(lines.begin() + i + 1, lines.begin() + close));
    if (content.empty()) {
      throw Error(Errc::ExtractionFailed, "first fenced block is empty");
    }
    return content;
  }

  if (!containsSymbolUse(raw_response, profile.function_symbol)) {
    throw Error(Errc::ExtractionFailed,
                "response has no code fence and no '" + profile.function_symbol +
                    "' definition");
  }

  std::size_t first = 0;
  std::size_t last = lines.size();
  while (first < last && !looksLikeCode(lines[first])) ++first;
  while (last > first && !looksLikeCode(lines[last - 1])) --last;
  std::string content =
      trimBlankEdges(std::vector<std::string>(lines.begin() + first, lines.begin() + last));
  if (content.empty()) {
    throw Error(Errc::ExtractionFailed, "response contains no code lines");
  }
  return content;
}

// ---------------------------------------------------------------------------
// Stub provider
// ---------------------------------------------------------------------------

namespace {

int countOccurrences(const std::string& text, const std::string& needle) {
  int count = 0;
  for (std::size_t pos = text.find(needle); pos != std::string::npos;
       pos = text.find(needle, pos + needle.size())) {
    ++count;
  }
  return count;
}

// Splices an insertion just before the last whole-word occurrence of anchor.
// The block starts on its own line so later line-diffs see existing lines
// unchanged.
std::string insertBeforeLastWord(const std::string& code, const std::string& anchor,
                                 const std::string& insertion) {
  auto is_ident = [](char c) {
    return std::isalnum(static_cast<unsigned char>(c)) || c == '_';
  };
  std::size_t best = std::string::npos;
  for (std::size_t pos = code.find(anchor); pos != std::string::npos;
       pos = code.find(anchor, pos + 1)) {
    bool left_ok = pos == 0 || !is_ident(code[pos - 1]);
    std::size_t end = pos + anchor.size();
    bool right_ok = end >= code.size() || !is_ident(code[end]);
    if (left_ok && right_ok) best = pos;
  }
  if (best == std::string::npos) return code + "\n" + insertion;
  std::string prefix = code.substr(0, best);
  std::size_t line_begin = prefix.rfind('\n');
  line_begin = line_begin == std::string::npos ? 0 : line_begin + 1;
  bool anchor_at_line_start =
      prefix.find_first_not_of(" \t", line_begin) == std::string::npos;
  return prefix + (anchor_at_line_start ? "" : "\n") + insertion + "\n  " +
         code.substr(best);
}

// Rust variant: keeps the trailing value expression of the function body in
// tail position.
std::string insertBeforeRustTail(const std::string& code, const std::string& insertion) {
  std::size_t best = code.rfind("0 }");
  if (best == std::string::npos) return code + "\n" + insertion;
  return code.substr(0, best) + "\n" + insertion + "\n    " + code.substr(best);
}

std::string replaceFirst(const std::string& text, const std::string& from,
                         const std::string& to, bool* replaced) {
  std::size_t pos = text.find(from);
  if (pos == std::string::npos) {
    if (replaced != nullptr) *replaced = false;
    return text;
  }
  if (replaced != nullptr) *replaced = true;
  return text.substr(0, pos) + to + text.substr(pos + from.size());
}

// Rewrites the first "<ident> == <integer>" comparison into the equivalent
// "<ident> >= <n> && <ident> <= <n>" form.
std::string complicateEquality(const std::string& code, bool* replaced) {
  auto is_ident = [](char c) {
    return std::isalnum(static_cast<unsigned char>(c)) || c == '_';
  };
  for (std::size_t pos = code.find("=="); pos != std::string::npos;
       pos = code.find("==", pos + 2)) {
    // Left side: an identifier.
    std::size_t l = pos;
    while (l > 0 && std::isspace(static_cast<unsigned char>(code[l - 1]))) --l;
    std::size_t l_end = l;
    while (l > 0 && is_ident(code[l - 1])) --l;
    if (l == l_end || std::isdigit(static_cast<unsigned char>(code[l]))) continue;
    // Right side: an integer literal.
    std::size_t r = pos + 2;
    while (r < code.size() && std::isspace(static_cast<unsigned char>(code[r]))) ++r;
    std::size_t r_end = r;
    while (r_end < code.size() && std::isdigit(static_cast<unsigned char>(code[r_end])))
      ++r_end;
    if (r_end == r) continue;
    if (r_end < code.size() && is_ident(code[r_end])) continue;
    std::string ident = code.substr(l, l_end - l);
    std::string number = code.substr(r, r_end - r);
    std::string rewritten = ident + " >= " + number + " && " + ident + " <= " + number;
    if (replaced != nullptr) *replaced = true;
    return code.substr(0, l) + rewritten + code.substr(r_end);
  }
  if (replaced != nullptr) *replaced = false;
  return code;
}

std::string freshHelperName(const std::string& code, const std::string& base) {
  for (int n = 1;; ++n) {
    std::string name = base + std::to_string(n);
    if (code.find(name) == std::string::npos) return name;
  }
}

// Inserts a file-scope item after any leading inner attributes (Rust's
// #![...] lines must stay first).
std::string prependItem(const std::string& code, const std::string& item) {
  std::vector<std::string> lines = splitLines(code);
  std::size_t at = 0;
  while (at < lines.size() && lines[at].rfind("#![", 0) == 0) ++at;
  std::string out;
  for (std::size_t i = 0; i < lines.size(); ++i) {
    if (i == at) out += item + "\n";
    out += lines[i];
    if (i + 1 < lines.size()) out += '\n';
  }
  if (at >= lines.size()) out += "\n" + item;
  return out;
}

std::string cFamilyRule(const std::string& id, const std::string& code) {
  auto insert = [&](const std::string& block) {
    return insertBeforeLastWord(code, "return", block);
  };
  if (id == "if-stmt") {
    return insert(
        "if (a > 2)\n"
        "{\n"
        "  a = a + 1;\n"
        "} /* SP_MARK */");
  }
  if (id == "nested-if-stmt") {
    return insert(
        "if (a > 1)\n"
        "{\n"
        "  if (a > 3)\n"
        "  {\n"
        "    a = a + 2;\n"
        "  }\n"
        "} /* SP_MARK */");
  }
  if (id == "dead-if-stmt") {
    return insert(
        "if (0)\n"
        "{\n"
        "  a = a + 1;\n"
        "} /* SP_MARK_DEAD */");
  }
  if (id == "dead-nested-if-stmt") {
    return insert(
        "if (0)\n"
        "{\n"
        "  if (a > 3)\n"
        "  {\n"
        "    a = a + 2;\n"
        "  }\n"
        "} /* SP_MARK_DEAD */");
  }
  if (id == "loop") {
    return insert(
        "for (int sp_i = 0; sp_i < 3 && a < 1000000; ++sp_i)\n"
        "{\n"
        "  a = a + sp_i;\n"
        "} /* SP_MARK */");
  }
  if (id == "dead-loop") {
    return insert(
        "if (0)\n"
        "{\n"
        "  for (int sp_i = 0; sp_i < 100 && a > -1000000; ++sp_i)\n"
        "  {\n"
        "    a = a - sp_i;\n"
        "  }\n"
        "} /* SP_MARK_DEAD */");
  }
  if (id == "nested-loop") {
    return insert(
        "for (int sp_i = 0; sp_i < 2; ++sp_i)\n"
        "{\n"
        "  for (int sp_j = 0; sp_j < 3 && a < 1000000; ++sp_j)\n"
        "  {\n"
        "    a = a + sp_j;\n"
        "  }\n"
        "} /* SP_MARK */");
  }
  if (id == "dead-nested-loop") {
    return insert(
        "if (0)\n"
        "{\n"
        "  for (int sp_i = 0; sp_i < 2; ++sp_i)\n"
        "  {\n"
        "    for (int sp_j = 0; sp_j < 3; ++sp_j)\n"
        "    {\n"
        "      a = a + sp_j;\n"
        "    }\n"
        "  }\n"
        "} /* SP_MARK_DEAD */");
  }
  if (id == "complicate-condition") {
    bool replaced = false;
    std::string next = complicateEquality(code, &replaced);
    return insertBeforeLastWord(next, "return", "/* SP_MARK */");
  }
  if (id == "complicate-dead-condition") {
    bool replaced = false;
    std::string next = replaceFirst(code, "if (0)", "if (0 && a > 3)", &replaced);
    return insertBeforeLastWord(next, "return", "/* SP_MARK_DEAD */");
  }
  if (id == "array-code") {
    return insert(
        "{\n"
        "  int sp_arr[4] = {1, 2, 3, 4};\n"
        "  for (int sp_i = 0; sp_i < 4; ++sp_i)\n"
        "  {\n"
        "    a = a + sp_arr[sp_i];\n"
        "  }\n"
        "} /* SP_MARK */");
  }
  if (id == "pointer-code") {
    return insert(
        "{\n"
        "  int sp_val = a;\n"
        "  int *sp_ptr = &sp_val;\n"
        "  a = a + *sp_ptr;\n"
        "} /* SP_MARK */");
  }
  if (id == "struct-code") {
    return insert(
        "{\n"
        "  struct sp_pair { int x; int y; };\n"
        "  struct sp_pair sp_p = { a, 2 };\n"
        "  a = a + sp_p.x + sp_p.y;\n"
        "} /* SP_MARK */");
  }
  if (id == "union-code") {
    return insert(
        "{\n"
        "  union sp_box { int i; long l; };\n"
        "  union sp_box sp_b;\n"
        "  sp_b.i = a;\n"
        "  a = a + sp_b.i;\n"
        "} /* SP_MARK */");
  }
  if (id == "add-function-args") {
    std::string helper = freshHelperName(code, "sp_helper");
    std::string with_def = prependItem(
        code, "static int " + helper + "(int sp_x, int sp_y) { return sp_x + sp_y; }");
    return insertBeforeLastWord(with_def, "return",
                                "a = a + " + helper + "(a, 3); /* SP_MARK */");
  }
  return {};
}

std::string rustRule(const std::string& id, const std::string& code) {
  auto insert = [&](const std::string& block) { return insertBeforeRustTail(code, block); };
  if (id == "dead-if-stmt") {
    return insert(
        "    if false\n"
        "    {\n"
        "        let _sp = a + 1;\n"
        "    } // SP_MARK_DEAD");
  }
  if (id == "dead-nested-if-stmt") {
    return insert(
        "    if false\n"
        "    {\n"
        "        if a > 3\n"
        "        {\n"
        "            let _sp = a + 2;\n"
        "        }\n"
        "    } // SP_MARK_DEAD");
  }
  if (id == "dead-loop") {
    return insert(
        "    if false\n"
        "    {\n"
        "        for _sp_i in 1..100\n"
        "        {\n"
        "            let _sp = a - 1;\n"
        "        }\n"
        "    } // SP_MARK_DEAD");
  }
  if (id == "dead-nested-loop") {
    return insert(
        "    if false\n"
        "    {\n"
        "        for _sp_i in 1..3\n"
        "        {\n"
        "            for _sp_j in 1..4\n"
        "            {\n"
        "                let _sp = a + 1;\n"
        "            }\n"
        "        }\n"
        "    } // SP_MARK_DEAD");
  }
  if (id == "complicate-dead-condition") {
    bool replaced = false;
    std::string next = replaceFirst(code, "if false", "if false && a > 3", &replaced);
    return insertBeforeRustTail(next, "    // SP_MARK_DEAD");
  }
  if (id == "if-stmt") {
    return insert(
        "    if a > 2\n"
        "    {\n"
        "        let _sp = a + 1;\n"
        "    } // SP_MARK");
  }
  if (id == "nested-if-stmt") {
    return insert(
        "    if a > 1\n"
        "    {\n"
        "        if a > 3\n"
        "        {\n"
        "            let _sp = a + 2;\n"
        "        }\n"
        "    } // SP_MARK");
  }
  if (id == "loop") {
    return insert(
        "    for _sp_i in 1..3\n"
        "    {\n"
        "        let _sp = a + 1;\n"
        "    } // SP_MARK");
  }
  if (id == "nested-loop") {
    return insert(
        "    for _sp_i in 1..3\n"
        "    {\n"
        "        for _sp_j in 1..4\n"
        "        {\n"
        "            let _sp = a + 1;\n"
        "        }\n"
        "    } // SP_MARK");
  }
  if (id == "complicate-condition") {
    bool replaced = false;
    std::string next = complicateEquality(code, &replaced);
    return insertBeforeRustTail(next, "    // SP_MARK");
  }
  if (id == "array-code") {
    return insert(
        "    {\n"
        "        let sp_arr: [i32; 3] = [1, 2, 3];\n"
        "        let mut sp_s = a;\n"
        "        for sp_v in sp_arr { sp_s += sp_v; }\n"
        "        let _sp = sp_s;\n"
        "    } // SP_MARK");
  }
  if (id == "pointer-code") {
    return insert(
        "    {\n"
        "        let sp_val = a;\n"
        "        let sp_ref = &sp_val;\n"
        "        let _sp = *sp_ref;\n"
        "    } // SP_MARK");
  }
  if (id == "struct-code") {
    return insert(
        "    {\n"
        "        struct SpPair { x: i32, y: i32 }\n"
        "        let sp_p = SpPair { x: a, y: 2 };\n"
        "        let _sp = sp_p.x + sp_p.y;\n"
        "    } // SP_MARK");
  }
  if (id == "union-code") {
    return insert(
        "    {\n"
        "        enum SpBox { V(i32) }\n"
        "        let sp_b = SpBox::V(a);\n"
        "        let SpBox::V(_sp) = sp_b;\n"
        "    } // SP_MARK");
  }
  if (id == "add-function-args") {
    std::string helper = freshHelperName(code, "sp_helper");
    std::string with_def = prependItem(
        code, "fn " + helper + "(sp_x: i32, sp_y: i32) -> i32 { sp_x + sp_y }");
    return insertBeforeRustTail(with_def,
                                "    let _sp = " + helper + "(a, 3); // SP_MARK");
  }
  return {};
}

std::string swiftRule(const std::string& id, const std::string& code) {
  auto insert = [&](const std::string& block) {
    return insertBeforeLastWord(code, "return", block);
  };
  if (id == "dead-if-stmt") {
    return insert(
        "if false\n"
        "{\n"
        "    _ = a + 1\n"
        "} // SP_MARK_DEAD");
  }
  if (id == "dead-nested-if-stmt") {
    return insert(
        "if false\n"
        "{\n"
        "    if a > 3\n"
        "    {\n"
        "        _ = a + 2\n"
        "    }\n"
        "} // SP_MARK_DEAD");
  }
  if (id == "dead-loop") {
    return insert(
        "if false\n"
        "{\n"
        "    for sp_i in 0..<100\n"
        "    {\n"
        "        _ = sp_i\n"
        "    }\n"
        "} // SP_MARK_DEAD");
  }
  if (id == "dead-nested-loop") {
    return insert(
        "if false\n"
        "{\n"
        "    for sp_i in 0..<3\n"
        "    {\n"
        "        for sp_j in 0..<4\n"
        "        {\n"
        "            _ = sp_i + sp_j\n"
        "        }\n"
        "    }\n"
        "} // SP_MARK_DEAD");
  }
  if (id == "complicate-dead-condition") {
    bool replaced = false;
    std::string next = replaceFirst(code, "if false", "if false && a > 3", &replaced);
    return insertBeforeLastWord(next, "return", "// SP_MARK_DEAD");
  }
  if (id == "if-stmt") {
    return insert(
        "if a > 2\n"
        "{\n"
        "    _ = a + 1\n"
        "} // SP_MARK");
  }
  if (id == "nested-if-stmt") {
    return insert(
        "if a > 1\n"
        "{\n"
        "    if a > 3\n"
        "    {\n"
        "        _ = a + 2\n"
        "    }\n"
        "} // SP_MARK");
  }
  if (id == "loop") {
    return insert(
        "for sp_i in 0..<3\n"
        "{\n"
        "    _ = sp_i\n"
        "} // SP_MARK");
  }
  if (id == "nested-loop") {
    return insert(
        "for sp_i in 0..<3\n"
        "{\n"
        "    for sp_j in 0..<4\n"
        "    {\n"
        "        _ = sp_i + sp_j\n"
        "    }\n"
        "} // SP_MARK");
  }
  if (id == "complicate-condition") {
    bool replaced = false;
    std::string next = complicateEquality(code, &replaced);
    return insertBeforeLastWord(next, "return", "// SP_MARK");
  }
  if (id == "array-code") {
    return insert(
        "do {\n"
        "    let sp_arr = [1, 2, 3]\n"
        "    var sp_s = 0\n"
        "    for sp_v in sp_arr { sp_s += sp_v }\n"
        "    _ = sp_s\n"
        "} // SP_MARK");
  }
  if (id == "pointer-code") {
    return insert(
        "do {\n"
        "    var sp_val = a\n"
        "    withUnsafePointer(to: &sp_val) { sp_p in _ = sp_p.pointee }\n"
        "} // SP_MARK");
  }
  if (id == "struct-code") {
    return insert(
        "do {\n"
        "    struct SpPair { var x: Int; var y: Int }\n"
        "    let sp_p = SpPair(x: a, y: 2)\n"
        "    _ = sp_p.x + sp_p.y\n"
        "} // SP_MARK");
  }
  if (id == "union-code") {
    return insert(
        "do {\n"
        "    enum SpBox { case v(Int) }\n"
        "    let sp_b = SpBox.v(a)\n"
        "    if case let SpBox.v(sp_v) = sp_b { _ = sp_v }\n"
        "} // SP_MARK");
  }
  if (id == "add-function-args") {
    std::string helper = freshHelperName(code, "spHelper");
    std::string with_def = prependItem(
        code, "func " + helper + "(_ sp_x: Int, _ sp_y: Int) -> Int { return sp_x + sp_y }");
    return insertBeforeLastWord(with_def, "return", "_ = " + helper + "(a, 3) // SP_MARK");
  }
  return {};
}

}  // namespace

int StubProvider::countMarkers(const std::string& code) {
  return countOccurrences(code, "SP_MARK");
}

std::string StubProvider::mutate(const PromptRequest& request) {
  const std::string& code = request.code;
  if (options_.break_at_step > 0 && countMarkers(code) + 1 == options_.break_at_step) {
    // Applied as-is by downstream stages; no compiler accepts it.
    return code + "\nint sp_broken( /* SP_SYNTAX_ERROR SP_MARK */\n";
  }

  std::string mutated;
  if (request.language == "c" || request.language == "cpp") {
    mutated = cFamilyRule(request.instruction.id, code);
  } else if (request.language == "rust") {
    mutated = rustRule(request.instruction.id, code);
  } else if (request.language == "swift") {
    mutated = swiftRule(request.instruction.id, code);
  } else {
    throw Error(Errc::ProviderUnavailable,
                "stub has no rule table for language '" + request.language + "'");
  }
  if (mutated.empty()) {
    throw Error(Errc::ProviderUnavailable, "stub has no rule for instruction '" +
                                               request.instruction.id + "'");
  }
  return mutated;
}

// ---------------------------------------------------------------------------
// Remote provider
// ---------------------------------------------------------------------------

RemoteProvider::RemoteProvider(Options options) : options_(std::move(options)) {
  const std::string& endpoint = options_.endpoint;
  std::size_t scheme_end = endpoint.find("://");
  if (scheme_end == std::string::npos) {
    throw Error(Errc::ConfigError, "endpoint must be an http URL: '" + endpoint + "'");
  }
  std::string scheme = endpoint.substr(0, scheme_end);
  if (scheme != "http") {
    throw Error(Errc::ConfigError,
                "only plain http endpoints are supported, got scheme '" + scheme + "'");
  }
  std::size_t path_start = endpoint.find('/', scheme_end + 3);
  if (path_start == std::string::npos) {
    scheme_host_port_ = endpoint;
    path_ = "/";
  } else {
    scheme_host_port_ = endpoint.substr(0, path_start);
    path_ = endpoint.substr(path_start);
  }
}

std::string RemoteProvider::requestBody(const PromptRequest& request) const {
  json body;
  body["model"] = options_.model;
  body["messages"] = json::array({json{{"role", "user"}, {"content", request.rendered_prompt}}});
  for (const auto& [key, value] : options_.params) {
    json parsed = json::parse(value, nullptr, false);
    if (!parsed.is_discarded() && !parsed.is_object() && !parsed.is_array()) {
      body[key] = parsed;
    } else {
      body[key] = value;
    }
  }
  return body.dump();
}

std::string RemoteProvider::parseResponseContent(const std::string& body) {
  json doc = json::parse(body, nullptr, false);
  if (doc.is_discarded()) return {};
  // OpenAI-style first, then the common single-message shapes.
  if (doc.contains("choices") && doc["choices"].is_array() && !doc["choices"].empty()) {
    const json& first = doc["choices"][0];
    if (first.contains("message") && first["message"].contains("content") &&
        first["message"]["content"].is_string()) {
      return first["message"]["content"].get<std::string>();
    }
    if (first.contains("text") && first["text"].is_string()) {
      return first["text"].get<std::string>();
    }
  }
  if (doc.contains("message") && doc["message"].is_object() &&
      doc["message"].contains("content") && doc["message"]["content"].is_string()) {
    return doc["message"]["content"].get<std::string>();
  }
  if (doc.contains("content") && doc["content"].is_string()) {
    return doc["content"].get<std::string>();
  }
  if (doc.contains("response") && doc["response"].is_string()) {
    return doc["response"].get<std::string>();
  }
  return {};
}

std::string RemoteProvider::mutate(const PromptRequest& request) {
  std::string body = requestBody(request);
  std::string last_failure = "no attempt made";
  double backoff = options_.backoff_initial;

  for (int attempt = 0; attempt <= options_.max_retries; ++attempt) {
    if (attempt > 0) {
      std::this_thread::sleep_for(std::chrono::duration<double>(backoff));
      backoff *= 2;
    }
    httplib::Client client(scheme_host_port_);
    auto seconds = static_cast<time_t>(options_.request_timeout);
    auto micros = static_cast<time_t>((options_.request_timeout - static_cast<double>(seconds)) * 1e6);
    client.set_connection_timeout(seconds, micros);
    client.set_read_timeout(seconds, micros);
    client.set_write_timeout(seconds, micros);

    auto start = std::chrono::steady_clock::now();
    httplib::Result result = client.Post(path_, body, "application/json");
    double elapsed = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

    if (result) {
      if (result->status >= 200 && result->status < 300) {
        std::string content = parseResponseContent(result->body);
        if (!content.empty()) return content;
        last_failure = "response carried no message content";
      } else {
        last_failure = "HTTP status " + std::to_string(result->status);
      }
    } else {
      // A full-timeout attempt aborts the episode rather than retrying.
      if (elapsed >= options_.request_timeout * 0.9) {
        throw Error(Errc::ProviderTimeout,
                    "no response from " + options_.endpoint + " within " +
                        std::to_string(options_.request_timeout) + "s");
      }
      last_failure = "transport error " + std::to_string(static_cast<int>(result.error()));
    }
  }
  throw Error(Errc::ProviderUnavailable,
              options_.endpoint + " unreachable after " +
                  std::to_string(options_.max_retries) + " retries: " + last_failure);
}

std::unique_ptr<MutationProvider> makeStubProvider(StubProvider::Options options) {
  return std::make_unique<StubProvider>(options);
}

std::unique_ptr<MutationProvider> makeRemoteProvider(RemoteProvider::Options options) {
  return std::make_unique<RemoteProvider>(std::move(options));
}

}  // namespace sizeprobe
