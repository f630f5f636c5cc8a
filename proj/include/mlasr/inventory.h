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

#include <cstdint>
#include <set>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace mlasr {

inline constexpr std::string_view kBlankSymbol = "<b>";
inline constexpr int32_t kBlankIndex = 0;

enum class UnitKind { kPhoneme, kSubword };

const char *UnitKindName(UnitKind kind);
UnitKind ParseUnitKind(std::string_view name);

// A unit symbol must be non-empty valid UTF-8 without whitespace.
bool IsValidUnitSymbol(std::string_view symbol);

// Phoneme or subword inventory of a single language. Never holds the blank.
struct LanguageInventory {
  std::string language_code;
  std::set<std::string> units;
};

// Base IPA symbols (no diacritics or suprasegmentals), code point order
// roughly in chart order.
const std::vector<std::string> &IpaRegistry();

// Throws kInvalidArgument naming the units of `inv` absent from `registry`.
void CheckInventory(const LanguageInventory &inv,
                    const std::vector<std::string> &registry = IpaRegistry());

// Dense bidirectional unit <-> index table. The blank is always at index 0;
// the remaining units follow in the order they were given.
class Alphabet {
 public:
  Alphabet() = default;

  // `units` excludes the blank. Throws kInvalidArgument on invalid or
  // duplicate symbols, or if the blank appears among them.
  Alphabet(UnitKind kind, const std::vector<std::string> &units);

  // Blank followed by `units` in code point order.
  static Alphabet FromSet(UnitKind kind, const std::set<std::string> &units);

  UnitKind kind() const { return kind_; }
  int32_t blank_index() const { return kBlankIndex; }

  // Number of entries including the blank.
  int32_t size() const { return static_cast<int32_t>(symbols_.size()); }

  int32_t IndexOf(std::string_view symbol) const;
  bool Contains(std::string_view symbol) const;
  const std::string &SymbolAt(int32_t index) const;

  // All symbols including the blank, in index order.
  const std::vector<std::string> &symbols() const { return symbols_; }
  // Non-blank symbols in index order.
  std::vector<std::string> units() const;

  bool operator==(const Alphabet &other) const {
    return kind_ == other.kind_ && symbols_ == other.symbols_;
  }

 private:
  UnitKind kind_ = UnitKind::kPhoneme;
  std::vector<std::string> symbols_{std::string(kBlankSymbol)};
  std::unordered_map<std::string, int32_t> index_{{std::string(kBlankSymbol), 0}};
};

// Blank + the set union of all inventories, in code point order.
Alphabet BuildUnionAlphabet(const std::vector<LanguageInventory> &inventories,
                            UnitKind kind = UnitKind::kPhoneme);

struct SharedNovelSplit {
  std::set<std::string> shared;
  std::set<std::string> novel;
};

SharedNovelSplit SplitSharedNovel(const Alphabet &multi,
                                  const LanguageInventory &cross);

// Inventory file: UTF-8, one symbol per line, blank implied.
LanguageInventory ReadInventory(const std::string &path,
                                const std::string &language_code = "");
void WriteInventory(const std::string &path, const LanguageInventory &inv);

// Alphabet listing file: one non-blank unit per line, index order.
Alphabet ReadAlphabetListing(const std::string &path, UnitKind kind);
void WriteAlphabetListing(const std::string &path, const Alphabet &alphabet);

}  // namespace mlasr
