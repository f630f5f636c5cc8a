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

#include <filesystem>
#include <fstream>
#include <sstream>

#include "doctest.h"
#include "mlasr/error.h"
#include "mlasr/lexicon.h"
#include "mlasr/world.h"

namespace fs = std::filesystem;
using namespace mlasr;

namespace {

SyntheticWorldConfig SmallConfig() {
  SyntheticWorldConfig c;
  c.num_seen_languages = 3;
  c.num_unseen = 1;
  c.seen_utterances = {40, 20};
  c.unseen_utterances = 20;
  c.feature_dim = 6;
  c.lexicon_min = 20;
  c.lexicon_max = 30;
  return c;
}

fs::path TempDir(const std::string &name) {
  auto p = fs::temp_directory_path() / ("mlasr_world_" + name);
  fs::remove_all(p);
  return p;
}

std::string Slurp(const fs::path &p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

TEST_CASE("generation is byte-identical for a fixed seed") {
  auto a = TempDir("a"), b = TempDir("b");
  GenerateWorld(SmallConfig(), a.string());
  GenerateWorld(SmallConfig(), b.string());
  size_t files = 0;
  for (const auto &entry : fs::recursive_directory_iterator(a)) {
    if (!entry.is_regular_file()) continue;
    auto rel = fs::relative(entry.path(), a);
    CHECK(Slurp(entry.path()) == Slurp(b / rel));
    ++files;
  }
  CHECK(files == 1 + 4 * 9);

  auto c = TempDir("c");
  auto other = SmallConfig();
  other.seed = 8;
  GenerateWorld(other, c.string());
  CHECK(Slurp(a / "lang-s1" / "feats.train.bin") != Slurp(c / "lang-s1" / "feats.train.bin"));
}

TEST_CASE("layout, splits and inventories") {
  auto dir = TempDir("layout");
  auto config = SmallConfig();
  GenerateWorld(config, dir.string());
  auto world = OpenWorld(dir.string());
  CHECK(world.seen == std::vector<std::string>{"s1", "s2", "s3"});
  CHECK(world.unseen == std::vector<std::string>{"u1"});

  std::set<std::string> seen_units;
  for (const auto &code : world.seen) {
    auto lang = LoadLanguage(world, code);
    CHECK(lang.seen);
    CHECK(static_cast<int>(lang.inventory.units.size()) >= config.inventory_min);
    CHECK(static_cast<int>(lang.inventory.units.size()) <= config.inventory_max);
    CheckInventory(lang.inventory);
    seen_units.insert(lang.inventory.units.begin(), lang.inventory.units.end());
    lang.lexicon.CheckUnits(lang.inventory.units);
    for (const auto &split : kSplits) {
      for (const auto &u : lang.splits.at(split)) CHECK(u.features.cols() == config.feature_dim);
    }
  }
  CHECK(static_cast<int>(seen_units.size()) <= config.universal_inventory_size);

  auto s1 = LoadLanguage(world, "s1");
  CHECK(s1.splits.at("train").size() == 32);
  CHECK(s1.splits.at("dev").size() == 4);
  CHECK(s1.splits.at("test").size() == 4);
  auto s3 = LoadLanguage(world, "s3");
  CHECK(s3.splits.at("train").size() == 16);

  auto u1 = LoadLanguage(world, "u1");
  CHECK_FALSE(u1.seen);
  int novel = 0;
  for (const auto &p : u1.inventory.units) novel += !seen_units.count(p);
  CHECK(novel >= config.unseen_novel_units);

  // Every sentence is pronounceable with the shipped lexicon.
  std::vector<std::string> texts;
  for (const auto &u : s1.splits.at("train")) texts.push_back(u.text);
  auto ph = PhonemizeCorpus(texts, s1.lexicon);
  CHECK(ph.skipped.empty());

  CHECK_THROWS_AS(LoadLanguage(world, "zz"), Error);
}

TEST_CASE("homophone rate follows the config") {
  auto dir = TempDir("homophones");
  auto config = SmallConfig();
  config.homophone_rate = 0.0;
  GenerateWorld(config, dir.string());
  auto world = OpenWorld(dir.string());
  for (const auto &code : world.seen)
    CHECK(ComputeLexiconStats(LoadLanguage(world, code).lexicon).homophone_rate == 0.0);

  config.homophone_rate = 0.3;
  GenerateWorld(config, dir.string());
  for (const auto &code : world.seen) {
    double r = ComputeLexiconStats(LoadLanguage(world, code).lexicon).homophone_rate;
    CHECK(r > 0.15);
    CHECK(r < 0.45);
  }
}

TEST_CASE("noise-free fixed-duration utterances are reproducible per phoneme string") {
  auto dir = TempDir("clean");
  auto config = SmallConfig();
  config.noise_std = 0.0;
  config.frames_min = config.frames_max = 3;
  config.pause_min = config.pause_max = 0;
  GenerateWorld(config, dir.string());
  auto world = OpenWorld(dir.string());
  auto lang = LoadLanguage(world, "s1");
  std::map<std::vector<std::string>, Matrix> by_phones;
  int repeats = 0;
  for (const auto &split : kSplits)
    for (const auto &u : lang.splits.at(split)) {
      auto ph = PhonemizeCorpus({u.text}, lang.lexicon);
      REQUIRE(ph.sequences.size() == 1);
      CHECK(u.features.rows() == 3 * static_cast<int>(ph.sequences[0].size()));
      auto [it, fresh] = by_phones.emplace(ph.sequences[0], u.features);
      if (!fresh) {
        ++repeats;
        CHECK(it->second == u.features);
      }
    }
  CHECK(repeats > 0);
}

TEST_CASE("config validation and JSON round trip") {
  auto c = SmallConfig();
  c.homophone_rate = 0.25;
  auto back = SyntheticWorldConfig::FromJson(c.ToJson());
  CHECK(back.ToJson() == c.ToJson());

  auto bad = SmallConfig();
  bad.inventory_max = bad.universal_inventory_size + 1;
  CHECK_THROWS_AS(bad.Validate(), Error);
  bad = SmallConfig();
  bad.inventory_min = 30;
  bad.inventory_max = 20;
  CHECK_THROWS_AS(bad.Validate(), Error);
  CHECK_THROWS_AS(SyntheticWorldConfig::FromJson("{\"noise_std\": -1}"), Error);
  CHECK_THROWS_AS(SyntheticWorldConfig::FromJson("[1]"), Error);
  CHECK_THROWS_AS(OpenWorld("/nonexistent/world"), Error);
}
