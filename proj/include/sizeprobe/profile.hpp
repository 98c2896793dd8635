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

#ifndef SIZEPROBE_PROFILE_HPP_
#define SIZEPROBE_PROFILE_HPP_

#include <map>
#include <string>

#include "sizeprobe/core.hpp"

namespace sizeprobe {

// Built-in profiles for c, cpp, rust and swift. Campaign configs may add or
// override entries.
const std::map<std::string, LanguageProfile>& builtinProfiles();

// Throws Error(UnknownLanguage) for ids without a profile.
const LanguageProfile& profileFor(const std::string& language_id);

// Whole-word scan used to gate Conditionals-category instructions: true when
// any of the profile's control keywords occurs in the code outside a larger
// identifier. Plain text, no parsing.
bool codeHasControlFlow(const std::string& code, const LanguageProfile& profile);

}  // namespace sizeprobe

#endif  // SIZEPROBE_PROFILE_HPP_
