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

#include "sizeprobe/profile.hpp"

#include <cctype>

namespace sizeprobe {

namespace {

LanguageProfile makeC() {
  LanguageProfile p;
  p.id = "c";
  p.display_name = "C";
  p.seed_code = "int f(int a) { return 0; }";
  p.function_symbol = "f";
  p.source_extension = ".c";
  p.driver_template =
      "{code}\n"
      "\n"
      "static volatile long long sizeprobe_sink;\n"
      "\n"
      "int main(void) {\n"
      "{calls}"
      "  return 0;\n"
      "}\n";
  p.call_template = "  sizeprobe_sink += (long long)({fn}({value}));\n";
  p.asm_comment_leader = "#";
  p.control_keywords = {"if", "for", "while", "do", "switch"};
  return p;
}

LanguageProfile makeCpp() {
  LanguageProfile p = makeC();
  p.id = "cpp";
  p.display_name = "C++";
  p.source_extension = ".cpp";
  return p;
}

LanguageProfile makeRust() {
  LanguageProfile p;
  p.id = "rust";
  p.display_name = "Rust";
  p.seed_code =
      "#![no_main]\n"
      "#[no_mangle]\n"
      "pub fn f(a: i32) -> i32 { 0 }";
  p.function_symbol = "f";
  p.source_extension = ".rs";
  p.driver_template =
      "{code}\n"
      "\n"
      "fn main() {\n"
      "    let mut sink: i64 = 0;\n"
      "{calls}"
      "    unsafe { std::ptr::write_volatile(&mut sink, sink); }\n"
      "    let _ = sink;\n"
      "}\n";
  p.call_template = "    sink = sink.wrapping_add({fn}({value}) as i64);\n";
  // The inner no-entry-point attribute cannot coexist with the driver's main.
  p.driver_strip = {"#![no_main]"};
  p.asm_comment_leader = "#";
  p.control_keywords = {"if", "for", "while", "loop", "match"};
  return p;
}

LanguageProfile makeSwift() {
  LanguageProfile p;
  p.id = "swift";
  p.display_name = "Swift";
  p.seed_code = "func f(a: Int) -> Int { return a }";
  p.function_symbol = "f";
  p.source_extension = ".swift";
  p.driver_template =
      "{code}\n"
      "\n"
      "var sizeprobeSink = 0\n"
      "{calls}"
      "print(sizeprobeSink)\n";
  p.call_template = "sizeprobeSink = sizeprobeSink &+ {fn}(a: {value})\n";
  p.asm_comment_leader = "#";
  p.control_keywords = {"if", "for", "while", "repeat", "switch"};
  return p;
}

}  // namespace

const std::map<std::string, LanguageProfile>& builtinProfiles() {
  static const std::map<std::string, LanguageProfile> kProfiles = {
      {"c", makeC()},
      {"cpp", makeCpp()},
      {"rust", makeRust()},
      {"swift", makeSwift()},
  };
  return kProfiles;
}

const LanguageProfile& profileFor(const std::string& language_id) {
  const auto& profiles = builtinProfiles();
  auto it = profiles.find(language_id);
  if (it == profiles.end()) {
    throw Error(Errc::UnknownLanguage, "no language profile for '" + language_id + "'");
  }
  return it->second;
}

bool codeHasControlFlow(const std::string& code, const LanguageProfile& profile) {
  auto is_ident = [](char c) {
    return std::isalnum(static_cast<unsigned char>(c)) || c == '_';
  };
  for (const auto& keyword : profile.control_keywords) {
    for (std::size_t pos = code.find(keyword); pos != std::string::npos;
         pos = code.find(keyword, pos + 1)) {
      bool left_ok = pos == 0 || !is_ident(code[pos - 1]);
      std::size_t end = pos + keyword.size();
      bool right_ok = end >= code.size() || !is_ident(code[end]);
      if (left_ok && right_ok) return true;
    }
  }
  return false;
}

}  // namespace sizeprobe
