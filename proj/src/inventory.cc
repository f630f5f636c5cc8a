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

#include "mlasr/inventory.h"

#include <fstream>

#include "mlasr/error.h"
#include "mlasr/utf8.h"

namespace mlasr {

const std::vector<std::string> &IpaRegistry() {
  static const std::vector<std::string> registry{
    "a", "b", "c", "d", "e", "f", "h", "i", "j", "k", "l", "m", "n", "o", "p",
    "q", "r", "s", "t", "u", "v", "w", "x", "y", "z", "ɐ", "ɑ", "ɒ", "æ", "ɓ",
    "ʙ", "β", "ɔ", "ɕ", "ç", "ɗ", "ɖ", "ð", "ə", "ɘ", "ɚ", "ɛ", "ɜ", "ɞ", "ɟ",
    "ʄ", "ɡ", "ɠ", "ɢ", "ʛ", "ɦ", "ɧ", "ħ", "ɥ", "ʜ", "ɨ", "ɪ", "ʝ", "ɭ", "ɬ",
    "ɫ", "ɮ", "ʟ", "ɱ", "ɯ", "ɰ", "ŋ", "ɳ", "ɲ", "ɴ", "ø", "ɵ", "ɸ", "θ", "œ",
    "ɶ", "ʘ", "ɹ", "ɺ", "ɾ", "ɻ", "ʀ", "ʁ", "ɽ", "ʂ", "ʃ", "ʈ", "ʉ", "ʊ", "ʋ",
    "ⱱ", "ʌ", "ɣ", "ɤ", "ʍ", "χ", "ʎ", "ʏ", "ʑ", "ʐ", "ʒ", "ʔ", "ʡ", "ʕ", "ʢ",
    "ǀ", "ǁ", "ǂ", "ǃ"};
  return registry;
}

void CheckInventory(const LanguageInventory &inv,
                    const std::vector<std::string> &registry) {
  std::set<std::string> known(registry.begin(), registry.end());
  std::string missing;
  for (const auto &u : inv.units)
    if (!known.count(u)) missing += (missing.empty() ? "" : " ") + u;
  if (!missing.empty())
    Fail(ErrorCode::kInvalidArgument, "inventory '" + inv.language_code +
                                          "' has unregistered units: " + missing);
}

const char *UnitKindName(UnitKind kind) {
  return kind == UnitKind::kPhoneme ? "phoneme" : "subword";
}

UnitKind ParseUnitKind(std::string_view name) {
  if (name == "phoneme") return UnitKind::kPhoneme;
  if (name == "subword") return UnitKind::kSubword;
  Fail(ErrorCode::kInvalidArgument, "unknown unit kind '" + std::string(name) + "'");
}

bool IsValidUnitSymbol(std::string_view symbol) {
  if (symbol.empty() || !utf8::IsValid(symbol)) return false;
  for (char32_t cp : utf8::Decode(symbol))
    if (utf8::IsSpace(cp)) return false;
  return true;
}

Alphabet::Alphabet(UnitKind kind, const std::vector<std::string> &units)
    : kind_(kind) {
  symbols_.reserve(units.size() + 1);
  for (const auto &u : units) {
    if (u == kBlankSymbol)
      Fail(ErrorCode::kInvalidArgument, "blank symbol among alphabet units");
    if (!IsValidUnitSymbol(u))
      Fail(ErrorCode::kInvalidArgument, "invalid unit symbol '" + u + "'");
    auto [it, inserted] =
        index_.emplace(u, static_cast<int32_t>(symbols_.size()));
    if (!inserted)
      Fail(ErrorCode::kInvalidArgument, "duplicate unit symbol '" + u + "'");
    symbols_.push_back(u);
  }
}

Alphabet Alphabet::FromSet(UnitKind kind, const std::set<std::string> &units) {
  // std::set<std::string> orders by bytes, which for valid UTF-8 is code
  // point order.
  return Alphabet(kind, std::vector<std::string>(units.begin(), units.end()));
}

int32_t Alphabet::IndexOf(std::string_view symbol) const {
  auto it = index_.find(std::string(symbol));
  if (it == index_.end())
    Fail(ErrorCode::kLookup, "unknown unit '" + std::string(symbol) + "'");
  return it->second;
}

bool Alphabet::Contains(std::string_view symbol) const {
  return index_.count(std::string(symbol)) > 0;
}

const std::string &Alphabet::SymbolAt(int32_t index) const {
  if (index < 0 || index >= size())
    Fail(ErrorCode::kLookup, "unit index " + std::to_string(index) +
                                 " out of range [0, " + std::to_string(size()) +
                                 ")");
  return symbols_[index];
}

std::vector<std::string> Alphabet::units() const {
  return {symbols_.begin() + 1, symbols_.end()};
}

Alphabet BuildUnionAlphabet(const std::vector<LanguageInventory> &inventories,
                            UnitKind kind) {
  if (inventories.empty())
    Fail(ErrorCode::kInvalidArgument, "no inventories given");
  std::set<std::string> all;
  for (const auto &inv : inventories) {
    if (inv.units.count(std::string(kBlankSymbol)))
      Fail(ErrorCode::kInvalidArgument,
           "inventory '" + inv.language_code + "' contains the blank symbol");
    all.insert(inv.units.begin(), inv.units.end());
  }
  return Alphabet::FromSet(kind, all);
}

SharedNovelSplit SplitSharedNovel(const Alphabet &multi,
                                  const LanguageInventory &cross) {
  if (multi.kind() != UnitKind::kPhoneme)
    Fail(ErrorCode::kInvalidArgument, "shared/novel split needs a phoneme alphabet");
  SharedNovelSplit out;
  for (const auto &u : cross.units) {
    if (u != kBlankSymbol && multi.Contains(u))
      out.shared.insert(u);
    else
      out.novel.insert(u);
  }
  return out;
}

namespace {

std::vector<std::string> ReadSymbolLines(const std::string &path) {
  std::ifstream in(path);
  if (!in) Fail(ErrorCode::kIo, "cannot open " + path);
  std::vector<std::string> out;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    auto fields = utf8::SplitWhitespace(line);
    if (fields.empty()) continue;
    if (fields.size() != 1)
      Fail(ErrorCode::kFormat, path + ":" + std::to_string(lineno) +
                                   ": expected one symbol per line");
    out.push_back(fields[0]);
  }
  return out;
}

}  // namespace

LanguageInventory ReadInventory(const std::string &path,
                                const std::string &language_code) {
  LanguageInventory inv;
  inv.language_code = language_code;
  for (auto &s : ReadSymbolLines(path)) {
    if (s == kBlankSymbol)
      Fail(ErrorCode::kInvalidArgument, path + ": blank symbol in inventory");
    inv.units.insert(std::move(s));
  }
  return inv;
}

void WriteInventory(const std::string &path, const LanguageInventory &inv) {
  std::ofstream out(path);
  if (!out) Fail(ErrorCode::kIo, "cannot write " + path);
  for (const auto &u : inv.units) out << u << '\n';
}

Alphabet ReadAlphabetListing(const std::string &path, UnitKind kind) {
  return Alphabet(kind, ReadSymbolLines(path));
}

void WriteAlphabetListing(const std::string &path, const Alphabet &alphabet) {
  std::ofstream out(path);
  if (!out) Fail(ErrorCode::kIo, "cannot write " + path);
  for (int32_t i = 1; i < alphabet.size(); ++i)
    out << alphabet.SymbolAt(i) << '\n';
}

}  // namespace mlasr
