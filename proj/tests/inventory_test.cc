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

#include <algorithm>
#include <filesystem>
#include <random>

#include "doctest.h"
#include "mlasr/error.h"
#include "mlasr/inventory.h"

using namespace mlasr;

namespace {

LanguageInventory Inv(const std::string &code, std::set<std::string> units) {
  return {code, std::move(units)};
}

// Ten inventories with the seen-language sizes 39,32,33,30,32,39,32,33,41,31
// over a 73-symbol pool: a 25-symbol common core plus consecutive windows
// over the remaining 48 symbols.
std::vector<LanguageInventory> TenLanguages() {
  const auto &reg = IpaRegistry();
  std::vector<std::string> core(reg.begin(), reg.begin() + 25);
  std::vector<std::string> extra(reg.begin() + 25, reg.begin() + 73);
  const int sizes[] = {39, 32, 33, 30, 32, 39, 32, 33, 41, 31};
  std::vector<LanguageInventory> out;
  size_t offset = 0;
  for (int i = 0; i < 10; ++i) {
    LanguageInventory inv{"l" + std::to_string(i), {core.begin(), core.end()}};
    for (int k = 0; k < sizes[i] - 25; ++k) inv.units.insert(extra[(offset + k) % extra.size()]);
    offset += sizes[i] - 25;
    REQUIRE(static_cast<int>(inv.units.size()) == sizes[i]);
    out.push_back(inv);
  }
  return out;
}

}  // namespace

TEST_CASE("ten seen languages give 73 phonemes plus blank") {
  auto langs = TenLanguages();
  Alphabet a = BuildUnionAlphabet(langs);
  CHECK(a.size() == 74);
  CHECK(a.SymbolAt(0) == "<b>");
  for (const auto &l : langs) CheckInventory(l);

  const auto &reg = IpaRegistry();
  // 31 phonemes from the pool plus 4 outside it.
  LanguageInventory pl{"pl", {reg.begin() + 30, reg.begin() + 61}};
  pl.units.insert(reg.begin() + 80, reg.begin() + 84);
  auto split = SplitSharedNovel(a, pl);
  CHECK(split.shared.size() == 31);
  CHECK(split.novel.size() == 4);
  LanguageInventory id{"id", {reg.begin() + 10, reg.begin() + 45}};
  split = SplitSharedNovel(a, id);
  CHECK(split.shared.size() == 35);
  CHECK(split.novel.empty());
}

TEST_CASE("small unions") {
  Alphabet a = BuildUnionAlphabet({Inv("x", {"a", "b"})});
  CHECK(a.symbols() == std::vector<std::string>{"<b>", "a", "b"});
  CHECK(a.IndexOf("b") == 2);
  Alphabet b = BuildUnionAlphabet({Inv("x", {"a", "b"}), Inv("y", {"b", "c"})});
  CHECK(b.size() == 4);
  CHECK_THROWS_AS(b.IndexOf("ZZZ"), Error);
  CHECK_THROWS_AS(b.SymbolAt(4), Error);
  CHECK_THROWS_AS(BuildUnionAlphabet({Inv("x", {"<b>"})}), Error);
  CHECK_THROWS_AS(BuildUnionAlphabet({}), Error);
  CHECK_THROWS_AS(Alphabet(UnitKind::kPhoneme, {"a", "a"}), Error);
  CHECK_THROWS_AS(Alphabet(UnitKind::kPhoneme, {"a b"}), Error);
}

TEST_CASE("union properties on random inventories") {
  std::mt19937_64 rng(3);
  const auto &reg = IpaRegistry();
  for (int trial = 0; trial < 100; ++trial) {
    std::vector<LanguageInventory> invs(1 + rng() % 4);
    std::set<std::string> all;
    for (auto &inv : invs) {
      for (int k = 0, n = 1 + rng() % 10; k < n; ++k) inv.units.insert(reg[rng() % 30]);
      all.insert(inv.units.begin(), inv.units.end());
    }
    Alphabet a = BuildUnionAlphabet(invs);
    CHECK(a.size() == static_cast<int>(all.size()) + 1);
    auto shuffled = invs;
    std::shuffle(shuffled.begin(), shuffled.end(), rng);
    CHECK(BuildUnionAlphabet(shuffled) == a);
    for (int i = 0; i < a.size(); ++i) CHECK(a.IndexOf(a.SymbolAt(i)) == i);

    LanguageInventory cross{"c", {}};
    for (int k = 0, n = rng() % 12; k < n; ++k) cross.units.insert(reg[rng() % 40]);
    auto split = SplitSharedNovel(a, cross);
    std::set<std::string> merged = split.shared;
    merged.insert(split.novel.begin(), split.novel.end());
    CHECK(merged == cross.units);
    for (const auto &u : split.shared) CHECK(!split.novel.count(u));
    for (const auto &u : split.shared) CHECK(a.Contains(u));
    for (const auto &u : split.novel) CHECK(!a.Contains(u));
  }
}

TEST_CASE("self intersection has no novel units") {
  Alphabet a = BuildUnionAlphabet({Inv("x", {"a", "ʃ"})});
  CHECK(SplitSharedNovel(a, Inv("x", {"a", "ʃ"})).novel.empty());
}

TEST_CASE("registry check") {
  CHECK_NOTHROW(CheckInventory(Inv("x", {"a", "ʃ"})));
  CHECK_THROWS_AS(CheckInventory(Inv("x", {"a", "ʃʰ"})), Error);
}

TEST_CASE("inventory and listing files") {
  auto dir = std::filesystem::temp_directory_path() / "mlasr_inventory_test";
  std::filesystem::create_directories(dir);
  auto inv = Inv("pl", {"a", "ɕ", "t"});
  WriteInventory((dir / "inv.txt").string(), inv);
  CHECK(ReadInventory((dir / "inv.txt").string(), "pl").units == inv.units);
  Alphabet a = BuildUnionAlphabet({inv});
  WriteAlphabetListing((dir / "alpha.txt").string(), a);
  CHECK(ReadAlphabetListing((dir / "alpha.txt").string(), UnitKind::kPhoneme) == a);
  CHECK_THROWS_AS(ReadInventory((dir / "missing.txt").string()), Error);
  std::filesystem::remove_all(dir);
}
