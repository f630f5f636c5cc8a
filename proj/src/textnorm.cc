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

#include "mlasr/textnorm.h"

#include <regex>

#include "json.hpp"
#include "mlasr/error.h"
#include "mlasr/utf8.h"

namespace mlasr {

std::set<char32_t> NormRules::DefaultStripMarks() {
  std::set<char32_t> marks{
      U'ˈ', U'ˌ', U'ː', U'ˑ', U'˥', U'˦', U'˧', U'˨', U'˩',
      U'ʼ', U'ʰ', U'ʷ', U'ʲ', U'ˠ', U'ˤ', U'ⁿ', U'ˡ', U'˞',
  };
  for (char32_t cp = 0x0300; cp <= 0x036F; ++cp) marks.insert(cp);
  return marks;
}

void NormRules::Validate() const {
  for (char32_t c : keep_chars)
    if (strip_marks.count(c))
      Fail(ErrorCode::kInvalidArgument,
           "character U+" + std::to_string(static_cast<uint32_t>(c)) +
               " is both kept and stripped");
  for (const auto &p : reject_patterns) {
    try {
      std::regex re(p);
    } catch (const std::regex_error &e) {
      Fail(ErrorCode::kInvalidArgument,
           "bad reject pattern '" + p + "': " + e.what());
    }
  }
}

NormResult Normalize(const std::string &text, const NormRules &rules) {
  std::string out;
  bool pending_space = false;
  for (char32_t cp : utf8::Decode(text)) {
    if (rules.strip_marks.count(cp)) continue;
    bool keep = rules.keep_chars.count(cp) > 0;
    if (!keep && utf8::IsPunctuation(cp)) {
      if (utf8::IsSeparatorPunctuation(cp)) pending_space = true;
      continue;
    }
    if (utf8::IsSpace(cp) || cp < 0x20 || cp == 0x7F) {
      pending_space = true;
      continue;
    }
    if (pending_space && !out.empty()) out.push_back(' ');
    pending_space = false;
    utf8::Append(out, rules.lowercase ? utf8::ToLower(cp) : cp);
  }
  NormResult result;
  for (const auto &p : rules.reject_patterns) {
    if (std::regex_search(out, std::regex(p))) {
      result.rejected = true;
      result.reason = p;
      return result;
    }
  }
  result.text = std::move(out);
  return result;
}

std::string StripMarks(const std::string &symbol,
                       const std::set<char32_t> &marks) {
  std::string out;
  for (char32_t cp : utf8::Decode(symbol))
    if (!marks.count(cp)) utf8::Append(out, cp);
  return out;
}

NormRules NormRulesFromJson(const std::string &json_text) {
  NormRules rules;
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(json_text);
  } catch (const nlohmann::json::exception &e) {
    Fail(ErrorCode::kConfig, std::string("normalization rules: ") + e.what());
  }
  auto cps = [](const std::string &s) {
    auto v = utf8::Decode(s);
    return std::set<char32_t>(v.begin(), v.end());
  };
  if (j.contains("keep_chars"))
    rules.keep_chars = cps(j["keep_chars"].get<std::string>());
  if (j.contains("lowercase")) rules.lowercase = j["lowercase"].get<bool>();
  if (j.contains("strip_marks"))
    rules.strip_marks = cps(j["strip_marks"].get<std::string>());
  if (j.contains("reject_patterns"))
    rules.reject_patterns = j["reject_patterns"].get<std::vector<std::string>>();
  rules.Validate();
  return rules;
}

}  // namespace mlasr
