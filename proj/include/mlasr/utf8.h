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

#include <string>
#include <string_view>
#include <vector>

namespace mlasr::utf8 {

// Decodes a UTF-8 string into code points. Throws kFormat on malformed input.
std::vector<char32_t> Decode(std::string_view text);

void Append(std::string &out, char32_t cp);
std::string Encode(const std::vector<char32_t> &cps);
std::string Encode(char32_t cp);

// Splits into one string per code point.
std::vector<std::string> SplitCodepoints(std::string_view text);

// Splits on runs of ASCII/Unicode whitespace; drops empty fields.
std::vector<std::string> SplitWhitespace(std::string_view text);

std::string Join(const std::vector<std::string> &parts, std::string_view sep);

bool IsValid(std::string_view text);
bool IsSpace(char32_t cp);
bool IsPunctuation(char32_t cp);
// Punctuation that separates words rather than joining them (dashes, slashes).
bool IsSeparatorPunctuation(char32_t cp);
char32_t ToLower(char32_t cp);

}  // namespace mlasr::utf8
