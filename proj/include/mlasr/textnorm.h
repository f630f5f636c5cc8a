// Copyright 2026 The mlasr Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <set>
#include <string>
#include <vector>

namespace mlasr {

// Text normalization rules. Punctuation is removed unless listed in
// `keep_chars`; dashes and slashes become word separators.
struct NormRules {
  std::set<char32_t> keep_chars{U'\''};
  bool lowercase = true;
  // Diacritics and suprasegmentals (stress, length, tone letters, combining
  // marks) removed from text and from G2P output symbols.
  std::set<char32_t> strip_marks = DefaultStripMarks();
  // ECMAScript regexes; a match on the normalized text rejects the sentence.
  std::vector<std::string> reject_patterns;

  static std::set<char32_t> DefaultStripMarks();

  // Throws kInvalidArgument if keep_chars and strip_marks intersect or a
  // reject pattern does not compile.
  void Validate() const;
};

struct NormResult {
  bool rejected = false;
  std::string text;    // normalized text when accepted
  std::string reason;  // matching pattern when rejected
};

NormResult Normalize(const std::string &text, const NormRules &rules = {});

// Removes strip marks from a symbol; may return an empty string.
std::string StripMarks(const std::string &symbol,
                       const std::set<char32_t> &marks);

// Reads rules from a JSON object: {"keep_chars": "'", "lowercase": true,
// "strip_marks": "ˈˌː", "reject_patterns": ["..."]}. Missing keys keep
// their defaults.
NormRules NormRulesFromJson(const std::string &json_text);

}  // namespace mlasr
